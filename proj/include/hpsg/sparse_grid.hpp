#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hpsg/basis.hpp"
#include "hpsg/knot_tree.hpp"

namespace hpsg {

/// A function of N variables, called with N coordinates.
using Function = std::function<double(std::span<const double>)>;

/// Axis-aligned box with an affine map onto the reference cube [-1,1]^N.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box reference(std::size_t dim);
  static Box unit(std::size_t dim);

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> x) const;

  std::vector<double> to_reference(std::span<const double> x) const;
  std::vector<double> from_reference(std::span<const double> y) const;

  friend bool operator==(const Box&, const Box&) = default;
};

struct GridNode {
  MultiKnot knot;
  double weight = 0.0;
  BasisND basis;
  /// f at the knot; the interpolant reproduces it exactly.
  double value = 0.0;

  int stage() const { return knot.level_sum(); }
};

/// Hierarchical interpolant on an adaptively grown set of knots.
///
/// Nodes are grouped into stages by level sum. A node can only be inserted
/// when one of its parents is already stored, and only into the newest stage
/// or the one after it. Evaluation descends a spanning tree of the
/// parent/child graph: a node's support box lies inside each parent's, so
/// subtrees whose box excludes x contribute nothing.
///
/// All knots live on [-1,1]^N; `evaluate` accepts points in `domain()` and
/// maps them there.
class SparseGrid {
 public:
  explicit SparseGrid(std::size_t dim);
  SparseGrid(std::size_t dim, Box domain);

  std::size_t dim() const { return dim_; }
  const Box& domain() const { return domain_; }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<GridNode>& nodes() const { return nodes_; }
  const GridNode* find(const MultiKnot& k) const;
  bool contains(const MultiKnot& k) const { return find(k) != nullptr; }

  /// Node indices per stage (A_0, A_1, ...); the last entry may be empty.
  const std::vector<std::vector<std::size_t>>& stages() const { return stages_; }
  /// -1 for an empty grid.
  int last_stage() const { return static_cast<int>(stages_.size()) - 1; }

  /// Interpolant at a point of `domain()`. Throws std::out_of_range outside.
  double evaluate(std::span<const double> x) const;
  /// Interpolant at a point of [-1,1]^N.
  double evaluate_reference(std::span<const double> y) const;
  /// Interpolant with the node at `k` temporarily using `basis`.
  double evaluate_reference(std::span<const double> y, const MultiKnot& k,
                            const BasisND& basis) const;
  /// Sum over every node without support pruning; test reference.
  double evaluate_exhaustive(std::span<const double> y) const;

  /// f_value minus the current interpolant at the knot. Throws if `k` is stored.
  double compute_surplus(const MultiKnot& k, double f_value) const;

  /// Stores a node with a precomputed weight.
  ///
  /// Throws std::invalid_argument for duplicates, dimension mismatch, a
  /// non-root first node or a knot without a stored parent, and
  /// std::logic_error when the knot's stage is already closed.
  void insert(GridNode node);

  /// Computes the surplus of `k` against the current grid and inserts it.
  const GridNode& insert(const MultiKnot& k, std::span<const int> degrees, double f_value);

  /// Replace the degree of axis `d` at a stored knot. Weights are kept.
  ///
  /// Only nodes of the newest stage may change: any later node's weight was
  /// computed against the old basis. Throws std::invalid_argument for an
  /// unknown knot or inadmissible degree, std::logic_error otherwise.
  void set_degree(const MultiKnot& k, std::size_t d, int degree);

  /// Function values seen so far, including knots that were not accepted.
  std::optional<double> cached_value(const MultiKnot& k) const;
  void cache_value(const MultiKnot& k, double value);
  std::size_t cache_size() const { return cache_.size(); }

 private:
  bool box_contains(std::size_t node, std::span<const double> y) const;
  double descend(std::span<const double> y, std::size_t swapped, const BasisND* basis) const;

  std::size_t dim_;
  Box domain_;
  std::vector<GridNode> nodes_;
  std::unordered_map<MultiKnot, std::size_t, MultiKnotHash> index_;
  std::vector<std::vector<std::size_t>> stages_;
  std::vector<std::vector<std::size_t>> tree_children_;
  std::vector<double> box_lo_;
  std::vector<double> box_hi_;
  std::unordered_map<MultiKnot, double, MultiKnotHash> cache_;
};

/// Piecewise-linear tensor interpolant of f on the full grid of level vector
/// `levels`, evaluated at y in [-1,1]^N. Level 0 on an axis means the constant
/// through the midpoint.
double tensor_interpolate_p1(const Function& f, std::span<const int> levels,
                             std::span<const double> y);

/// Smolyak combination formula over piecewise-linear tensor interpolants with
/// level budget q, evaluated at y in [-1,1]^N. Independent of SparseGrid.
double smolyak_reference_p1(const Function& f, int q, std::span<const double> y);

}  // namespace hpsg
