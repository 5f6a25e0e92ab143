#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace hpsg {

/// Deepest level for which knot positions stay exact in double precision.
inline constexpr int kMaxLevel = 50;

/// A dyadic knot on [-1,1], identified by its tree level and 1-based index.
///
/// Level 0 holds the single root knot 0, level 1 the two boundary knots -1
/// and 1, and level l >= 2 the 2^(l-1) odd multiples of 2^(1-l) shifted by -1.
struct Knot1D {
  int level = 0;
  std::int64_t index = 1;

  friend bool operator==(const Knot1D&, const Knot1D&) = default;
  friend auto operator<=>(const Knot1D&, const Knot1D&) = default;
};

struct Support1D {
  double lo = -1.0;
  double hi = 1.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Number of knots introduced at `level`.
std::int64_t knots_on_level(int level);

bool is_valid(const Knot1D& k);

/// Throws std::invalid_argument when `k` does not name a knot.
void validate(const Knot1D& k);

double position(const Knot1D& k);

/// Children in ascending position. The root has two, level-1 knots one each.
std::vector<Knot1D> children(const Knot1D& k);

/// std::nullopt for the root.
std::optional<Knot1D> parent(const Knot1D& k);

/// Parent, grandparent, ..., root.
std::vector<Knot1D> ancestors(const Knot1D& k);

Support1D support(const Knot1D& k);

/// Inverse of position(): the unique knot at `x`, if any, at or below `max_level`.
std::optional<Knot1D> knot_at(double x, int max_level = kMaxLevel);

/// Tensor product knot; component d lives on axis d.
class MultiKnot {
 public:
  MultiKnot() = default;
  explicit MultiKnot(std::vector<Knot1D> dims);

  /// The root knot (0,...,0) in `dim` dimensions.
  static MultiKnot root(std::size_t dim);

  std::size_t dim() const { return dims_.size(); }
  const Knot1D& operator[](std::size_t d) const { return dims_[d]; }
  const std::vector<Knot1D>& components() const { return dims_; }

  int level_sum() const { return level_sum_; }

  /// Copy with component `d` replaced.
  MultiKnot with(std::size_t d, const Knot1D& k) const;

  std::vector<double> position() const;

  friend bool operator==(const MultiKnot& a, const MultiKnot& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<Knot1D> dims_;
  int level_sum_ = 0;
};

struct MultiKnotHash {
  std::size_t operator()(const MultiKnot& k) const noexcept;
};

/// A multivariate child together with the axis along which it was generated.
struct AxisChild {
  MultiKnot knot;
  std::size_t axis = 0;
};

/// All children of `k`, axis by axis, each 1-D child in ascending order.
std::vector<AxisChild> multi_children(const MultiKnot& k);

}  // namespace hpsg
