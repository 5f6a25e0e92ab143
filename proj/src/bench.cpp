#include "hpsg/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hpsg {

std::string to_string(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::curve2d: return "curve2d";
    case FunctionKind::genz_c: return "genz-c";
    case FunctionKind::sobol_g: return "sobol-g";
    case FunctionKind::kink1d: return "kink1d";
  }
  return "unknown";
}

FunctionKind parse_function_kind(std::string_view name) {
  if (name == "curve2d") return FunctionKind::curve2d;
  if (name == "genz-c" || name == "genz_c") return FunctionKind::genz_c;
  if (name == "sobol-g" || name == "sobol_g") return FunctionKind::sobol_g;
  if (name == "kink1d") return FunctionKind::kink1d;
  throw std::invalid_argument("unknown function '" + std::string(name) +
                              "' (expected curve2d, genz-c, sobol-g or kink1d)");
}

TestFunction::TestFunction(FunctionKind kind, std::size_t dim)
    : kind_(kind), dim_(dim), domain_(Box::unit(dim)) {
  if (dim == 0) throw std::invalid_argument("test function dimension must be positive");
}

TestFunction TestFunction::make(FunctionKind kind, std::size_t dim) {
  switch (kind) {
    case FunctionKind::curve2d:
      if (dim != 2) throw std::invalid_argument("curve2d is two-dimensional");
      return curve2d();
    case FunctionKind::genz_c: return genz_c(dim);
    case FunctionKind::sobol_g: return sobol_g(dim);
    case FunctionKind::kink1d:
      if (dim != 1) throw std::invalid_argument("kink1d is one-dimensional");
      return kink1d();
  }
  throw std::invalid_argument("unknown function kind");
}

TestFunction TestFunction::curve2d() {
  TestFunction tf(FunctionKind::curve2d, 2);
  tf.kink_ = std::sqrt(0.3);
  return tf;
}

TestFunction TestFunction::genz_c(std::size_t dim) {
  TestFunction tf(FunctionKind::genz_c, dim);
  tf.a_.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) tf.a_[i] = std::ldexp(1.0, 2 - static_cast<int>(i));
  tf.kink_ = 0.51;
  return tf;
}

TestFunction TestFunction::sobol_g(std::size_t dim) {
  TestFunction tf(FunctionKind::sobol_g, dim);
  tf.a_.resize(dim);
  tf.a_[0] = 0.5;
  for (std::size_t i = 1; i < dim; ++i) tf.a_[i] = static_cast<double>(i * i);
  tf.kink_ = 0.66;
  return tf;
}

TestFunction TestFunction::kink1d(double r) {
  if (!(r > -1.0 && r < 1.0)) throw std::invalid_argument("kink1d: r must lie in (-1, 1)");
  TestFunction tf(FunctionKind::kink1d, 1);
  tf.domain_ = Box::reference(1);
  tf.kink_ = r;
  return tf;
}

double TestFunction::operator()(std::span<const double> x) const {
  if (!domain_.contains(x)) throw std::out_of_range(name() + ": point outside the domain");
  switch (kind_) {
    case FunctionKind::curve2d:
      return 1.0 / (std::abs(0.3 - x[0] * x[0] - x[1] * x[1]) + 0.1);
    case FunctionKind::genz_c: {
      double s = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) s += a_[i] * std::abs(x[i] - kink_);
      return std::exp(-s);
    }
    case FunctionKind::sobol_g: {
      double p = 1.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        p *= (4.0 * std::abs(x[i] * x[i] - kink_ * kink_) + a_[i]) / (a_[i] + 1.0);
      }
      return p;
    }
    case FunctionKind::kink1d:
      if (x[0] <= kink_) return 0.0;
      return std::sin((x[0] - kink_) / (1.0 - kink_) * std::numbers::pi);
  }
  return 0.0;
}

Function TestFunction::as_function() const {
  return [tf = *this](std::span<const double> x) { return tf(x); };
}

std::vector<double> map_to_reference(std::span<const double> x, const TestFunction& tf) {
  return tf.domain().to_reference(x);
}

std::vector<double> map_from_reference(std::span<const double> y, const TestFunction& tf) {
  return tf.domain().from_reference(y);
}

PointSet sample_test_points(const TestFunction& tf, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointSet out{tf.dim(), {}};
  out.coords.reserve(count * tf.dim());
  const auto& box = tf.domain();
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t d = 0; d < tf.dim(); ++d) {
      std::uniform_real_distribution<double> u(box.lo[d], box.hi[d]);
      out.coords.push_back(u(rng));
    }
  }
  return out;
}

PointSet sample_kink_points(const TestFunction& tf, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointSet out{tf.dim(), {}};
  out.coords.reserve(count * tf.dim());
  std::vector<double> x(tf.dim());
  for (std::size_t i = 0; i < count; ++i) {
    switch (tf.kind()) {
      case FunctionKind::curve2d: {
        const double theta = 0.5 * std::numbers::pi * unit(rng);
        x[0] = tf.kink_location() * std::cos(theta);
        x[1] = tf.kink_location() * std::sin(theta);
        break;
      }
      case FunctionKind::genz_c:
      case FunctionKind::sobol_g:
        for (auto& v : x) v = unit(rng);
        x[i % tf.dim()] = tf.kink_location();
        break;
      case FunctionKind::kink1d:
        x[0] = tf.kink_location() + 1e-9 * (2.0 * unit(rng) - 1.0);
        break;
    }
    out.push_back(x);
  }
  return out;
}

ErrorReport error_metrics(const Function& f, const Function& approx, const PointSet& random,
                          const PointSet& kink) {
  ErrorReport r;
  r.test_points = random.size();
  r.kink_points = kink.size();
  double sum_sq = 0.0;
  for (const PointSet* set : {&random, &kink}) {
    for (std::size_t i = 0; i < set->size(); ++i) {
      const auto x = (*set)[i];
      const double e = std::abs(f(x) - approx(x));
      r.err_inf = std::max(r.err_inf, e);
      sum_sq += e * e;
    }
  }
  const std::size_t total = r.test_points + r.kink_points;
  if (total > 0) r.err_l2 = std::sqrt(sum_sq / static_cast<double>(total));
  // The rounded square root can exceed the max by an ulp.
  r.err_l2 = std::min(r.err_l2, r.err_inf);
  return r;
}

ErrorReport error_metrics(const TestFunction& tf, const SparseGrid& grid, const PointSet& random,
                          const PointSet& kink) {
  if (grid.dim() != tf.dim() || !(grid.domain() == tf.domain())) {
    throw std::invalid_argument("grid was not built on the test function's domain");
  }
  return error_metrics(
      [&tf](std::span<const double> x) { return tf(x); },
      [&grid](std::span<const double> x) { return grid.evaluate(x); }, random, kink);
}

}  // namespace hpsg
