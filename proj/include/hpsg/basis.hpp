#pragma once

#include <span>
#include <vector>

#include "hpsg/knot_tree.hpp"

namespace hpsg {

/// Degree cap used throughout the experiments.
inline constexpr int kDefaultMaxDegree = 6;

/// True when `degree` may be attached to a knot on `level`:
/// 0 only at the root, otherwise 1 <= degree <= level.
bool is_admissible_degree(int level, int degree);

/// Interpolation anchors of a degree-`p` basis at `k` (2 <= p <= k.level).
///
/// The two ancestors bounding support(k) come first, followed by the p-2
/// remaining ancestors closest to position(k). Equidistant ancestors are
/// ordered by decreasing level.
std::vector<double> anchors(const Knot1D& k, int p);

/// One-dimensional hierarchical basis function of a given degree.
///
///  - degree 0: the constant 1 (root only)
///  - degree 1: linear on the level-1 half intervals, hat function for l >= 2
///  - degree p >= 2: Lagrange polynomial through the knot and its p anchors,
///    restricted to support(k)
class Basis1D {
 public:
  Basis1D() = default;
  Basis1D(const Knot1D& k, int degree);

  const Knot1D& knot() const { return knot_; }
  int degree() const { return degree_; }
  double node() const { return node_; }
  const Support1D& support() const { return support_; }
  const std::vector<double>& anchor_points() const { return anchors_; }

  double operator()(double x) const;

 private:
  Knot1D knot_;
  int degree_ = 0;
  double node_ = 0.0;
  double half_width_ = 1.0;
  Support1D support_;
  std::vector<double> anchors_;
};

/// Tensor product of per-axis bases aligned with a MultiKnot.
class BasisND {
 public:
  BasisND() = default;
  BasisND(const MultiKnot& k, std::span<const int> degrees);

  std::size_t dim() const { return axes_.size(); }
  const Basis1D& axis(std::size_t d) const { return axes_[d]; }
  std::vector<int> degrees() const;

  /// Rebuild the factor on axis `d` with a new degree.
  void set_degree(std::size_t d, int degree);

  bool in_support(std::span<const double> x) const;
  double operator()(std::span<const double> x) const;

 private:
  std::vector<Basis1D> axes_;
};

double eval_basis_1d(const Knot1D& k, int degree, double x);

/// Throws std::invalid_argument when the sizes of knot, degrees and x differ.
double eval_basis_nd(const MultiKnot& k, std::span<const int> degrees,
                     std::span<const double> x);

}  // namespace hpsg
