#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpsg/sparse_grid.hpp"

namespace hpsg {

enum class FunctionKind { curve2d, genz_c, sobol_g, kink1d };

/// CLI spelling: curve2d, genz-c, sobol-g, kink1d.
std::string to_string(FunctionKind kind);
/// Accepts the CLI spelling and the underscore variants. Throws std::invalid_argument.
FunctionKind parse_function_kind(std::string_view name);

/// Piecewise smooth benchmark functions with kinks.
///
///   curve2d  1 / (|0.3 - x1^2 - x2^2| + 0.1)           on [0,1]^2
///   genz_c   exp(-sum a_i |x_i - 0.51|), a_i = 2^(3-i)  on [0,1]^N
///   sobol_g  prod (4|x_i^2 - 0.66^2| + a_i) / (a_i + 1),
///            a_1 = 0.5, a_i = (i-1)^2                  on [0,1]^N
///   kink1d   0 for x <= r, sin(pi (x-r)/(1-r)) else,
///            r = -0.45                                 on [-1,1]
class TestFunction {
 public:
  static TestFunction make(FunctionKind kind, std::size_t dim);
  static TestFunction curve2d();
  static TestFunction genz_c(std::size_t dim);
  static TestFunction sobol_g(std::size_t dim);
  static TestFunction kink1d(double r = -0.45);

  FunctionKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::string name() const { return to_string(kind_); }
  const std::vector<double>& coefficients() const { return a_; }
  /// Location of the kink: 0.51 (genz_c), 0.66 (sobol_g), r (kink1d), sqrt(0.3) (curve2d radius).
  double kink_location() const { return kink_; }
  const Box& domain() const { return domain_; }

  /// Throws std::out_of_range outside domain().
  double operator()(std::span<const double> x) const;

  /// The same function as a Function object.
  Function as_function() const;

 private:
  TestFunction(FunctionKind kind, std::size_t dim);

  FunctionKind kind_;
  std::size_t dim_;
  std::vector<double> a_;
  double kink_ = 0.0;
  Box domain_;
};

std::vector<double> map_to_reference(std::span<const double> x, const TestFunction& tf);
std::vector<double> map_from_reference(std::span<const double> y, const TestFunction& tf);

/// Dense row-major list of points.
struct PointSet {
  std::size_t dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  std::span<const double> operator[](std::size_t i) const {
    return {coords.data() + i * dim, dim};
  }
  void push_back(std::span<const double> x) { coords.insert(coords.end(), x.begin(), x.end()); }
};

inline constexpr std::size_t kDefaultTestPoints = 100000;
inline constexpr std::size_t kDefaultKinkPoints = 1000;

/// `count` uniform points in the native domain. Deterministic in `seed`.
PointSet sample_test_points(const TestFunction& tf, std::size_t count, std::uint64_t seed);

/// `count` points on the kink locus in the native domain.
///
///   curve2d  quarter circle x1^2 + x2^2 = 0.3, uniform in angle
///   genz_c   x_k = 0.51 with k cycling over the axes, other coordinates uniform
///   sobol_g  as genz_c with 0.66
///   kink1d   r perturbed by at most 1e-9
PointSet sample_kink_points(const TestFunction& tf, std::size_t count, std::uint64_t seed);

struct ErrorReport {
  double err_inf = 0.0;
  double err_l2 = 0.0;
  std::size_t test_points = 0;
  std::size_t kink_points = 0;
};

/// Max and root-mean-square error of `approx` against `f` over both point
/// sets, normalised by the total point count.
ErrorReport error_metrics(const Function& f, const Function& approx, const PointSet& random,
                          const PointSet& kink = {});

/// Same, with the grid evaluated on the function's native domain.
ErrorReport error_metrics(const TestFunction& tf, const SparseGrid& grid, const PointSet& random,
                          const PointSet& kink = {});

}  // namespace hpsg
