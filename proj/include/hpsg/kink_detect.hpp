#pragma once

#include <optional>
#include <span>
#include <vector>

namespace hpsg {

/// Stencil order used by the refinement driver (five-point stencils).
inline constexpr int kAnnihilationOrder = 2;

/// Sorted sample abscissae around an evaluation point x.
///
/// `split` counts the points strictly left of x; the operator needs at least
/// two points on each side. `h` is the largest gap between neighbours.
class Stencil {
 public:
  /// Throws std::invalid_argument for unsorted or duplicated points, or
  /// fewer than two points on either side of `center`.
  Stencil(std::vector<double> points, double center);

  const std::vector<double>& points() const { return points_; }
  double center() const { return center_; }
  std::size_t split() const { return split_; }
  double h() const { return h_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<double> points_;
  double center_;
  std::size_t split_ = 0;
  double h_ = 0.0;
};

enum class JumpVariant { interior, boundary_left, boundary_right };

/// Approximation of [f'](x) = f'(x+) - f'(x-).
struct JumpEstimate {
  double value = 0.0;
  JumpVariant variant = JumpVariant::interior;
};

/// Solve the small dense system A c = b (row-major A) with partial pivoting.
/// Throws std::domain_error when A is numerically singular.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b);

/// Polynomial annihilation coefficients c_0..c_{m+2} for a stencil of m+3
/// points, using the monomial basis in coordinates local to the center.
/// Throws std::invalid_argument when the stencil size is not m+3.
std::vector<double> annihilation_coefficients(const Stencil& st, int m = kAnnihilationOrder);

/// h^(m-1) * sum c_i f(x_i).
JumpEstimate jump_estimate(const Stencil& st, std::span<const double> values,
                           int m = kAnnihilationOrder);

struct Sample {
  double x = 0.0;
  double f = 0.0;
};

/// One-sided variant for a single neighbour on one side of `center` and two
/// on the other: derivative of the quadratic through the center and the two
/// same-side samples, against the difference quotient toward the lone sample.
/// Throws std::invalid_argument unless `lone` and `same` lie on opposite
/// sides of `center` at distinct abscissae.
JumpEstimate boundary_jump_estimate(Sample lone, Sample center, Sample same_near, Sample same_far);

/// Jump estimate at `center` from samples on a line (sorted by x, `center`
/// excluded): the two nearest samples on each side when available, else the
/// boundary variant with one nearest sample on the short side. std::nullopt
/// when neither stencil can be formed.
std::optional<JumpEstimate> line_jump_estimate(std::span<const Sample> line, Sample center);

}  // namespace hpsg
