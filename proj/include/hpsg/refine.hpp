#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hpsg/grid_io.hpp"
#include "hpsg/kink_detect.hpp"
#include "hpsg/sparse_grid.hpp"

namespace hpsg {

/// Degree selection strategy.
///
///  - linear:  degree 1 everywhere
///  - highest: maximal admissible degree min(p_max, level)
///  - greedy:  parents re-pick each axis degree by the residual at their new
///             children; children inherit and increment along their axis
///  - kink:    as greedy's increment, dropped to 1 where a jump in f' is
///             detected along the child's axis; parents are never modified
enum class Strategy { linear, highest, greedy, kink };

std::string to_string(Strategy s);
/// Throws std::invalid_argument for unknown names.
Strategy parse_strategy(std::string_view name);

struct RefineConfig {
  Strategy strategy = Strategy::greedy;
  double w_max = 1e-3;
  double w_kink = 1.0;
  int p_max = kDefaultMaxDegree;
  int q_min = 1;
  int q_max = 25;
  std::size_t dim = 1;
  /// Native domain of f; defaults to [-1,1]^dim when left empty.
  Box domain;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  Box resolved_domain() const;
  DumpMeta meta() const;
};

struct BuildReport {
  std::size_t knots = 0;
  /// Distinct points at which f was evaluated, accepted or not.
  std::size_t evaluations = 0;
  std::vector<std::size_t> accepted_per_stage;
  /// Children whose degree was dropped to 1 by a detected kink.
  std::size_t kinks_detected = 0;
  double seconds = 0.0;
};

struct BuildResult {
  SparseGrid grid;
  BuildReport report;
};

/// f failed or returned a non-finite value at `point` (native coordinates).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(std::vector<double> point, const std::string& what);
  const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

/// Adaptive hp sparse grid construction.
///
/// Starting from the root, stage q examines every child of the knots accepted
/// at stage q-1. All children are evaluated (each distinct knot once), the
/// greedy strategy then revises its parents' degrees, and each child's
/// surplus is taken against the grid of stages < q. A child is accepted when
/// q <= q_min or |surplus| >= w_max and receives its degrees from the
/// strategy's selection rule. Stops after q_max or at the first empty stage.
BuildResult build(const Function& f, const RefineConfig& cfg);

/// Degrees min(p_max, level) per axis.
std::vector<int> selection_highest(const MultiKnot& child, int p_max);

/// Degree 1 per axis, 0 on root components.
std::vector<int> selection_linear(const MultiKnot& child);

/// Parent degrees with axis `d` raised by one, capped by p_max and the level.
std::vector<int> selection_greedy(const MultiKnot& child, std::span<const int> parent_degrees,
                                  std::size_t d, int p_max);

/// Residual max |U_p - f| over the axis-`d` children of `parent`, where U_p
/// is the interpolant with the parent's axis-`d` degree set to `p`.
/// Throws std::invalid_argument if a child has not been evaluated or `p` is
/// not admissible.
double greedy_score(const SparseGrid& grid, const MultiKnot& parent, std::size_t d, int p);

/// Scores for p = 1..min(p_max, level); entry i belongs to degree i+1.
std::vector<double> greedy_scores(const SparseGrid& grid, const MultiKnot& parent, std::size_t d,
                                  int p_max);

/// Sets each axis degree of `parent` to the score minimiser (smaller degree
/// on ties) and returns the resulting degree vector.
std::vector<int> modification_greedy(SparseGrid& grid, const MultiKnot& parent, int p_max);

struct KinkSelection {
  std::vector<int> degrees;
  /// |jump estimate| along the axis, when a stencil could be formed.
  std::optional<double> eta;
  bool kink = false;
};

/// Kink-strategy selection for a child generated along axis `d` at `stage`.
/// `line` holds the evaluated samples on the axis-`d` line through the child
/// (sorted by x, child excluded); `child_value` is f at the child.
KinkSelection selection_kink(const MultiKnot& child, std::span<const int> parent_degrees,
                             std::size_t d, int stage, std::span<const Sample> line,
                             double child_value, int p_max, double w_kink);

}  // namespace hpsg
