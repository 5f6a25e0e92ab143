#include "hpsg/kink_detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hpsg {

Stencil::Stencil(std::vector<double> points, double center)
    : points_(std::move(points)), center_(center) {
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i - 1] < points_[i])) {
      throw std::invalid_argument("stencil points must be strictly increasing");
    }
    h_ = std::max(h_, points_[i] - points_[i - 1]);
  }
  split_ = static_cast<std::size_t>(
      std::lower_bound(points_.begin(), points_.end(), center_) - points_.begin());
  if (split_ < 2 || points_.size() - split_ < 2) {
    throw std::invalid_argument("stencil needs at least two points on each side of the center");
  }
}

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("solve_dense: matrix is not n x n");
  double scale = 0.0;
  for (const double v : a) scale = std::max(scale, std::abs(v));
  const double tiny = scale * static_cast<double>(n) * std::numeric_limits<double>::epsilon();

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    if (!(std::abs(a[piv * n + col]) > tiny)) throw std::domain_error("singular linear system");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r * n + c] * x[c];
    x[r] = s / a[r * n + r];
  }
  return x;
}

std::vector<double> annihilation_coefficients(const Stencil& st, int m) {
  const auto n = static_cast<std::size_t>(m) + 3;
  if (m < 1 || st.size() != n) {
    throw std::invalid_argument("stencil of order " + std::to_string(m) + " needs " +
                                std::to_string(n) + " points");
  }
  // Unknowns are c_i * h^m in the scaled local coordinate s = (x_i - x) / h,
  // which makes the system independent of h.
  const double h = st.h();
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (st.points()[i] - st.center()) / h;

  std::vector<double> a(n * n, 0.0);
  std::vector<double> rhs(n, 0.0);
  double m_factorial = 1.0;
  for (int i = 2; i <= m; ++i) m_factorial *= i;

  for (int l = 0; l <= m; ++l) {
    const auto row = static_cast<std::size_t>(l);
    for (std::size_t i = 0; i < n; ++i) a[row * n + i] = std::pow(s[i], l);
    rhs[row] = l == m ? m_factorial : 0.0;
  }
  for (int l = 0; l <= 1; ++l) {
    const auto row = static_cast<std::size_t>(m + 1 + l);
    for (std::size_t i = st.split(); i < n; ++i) a[row * n + i] = std::pow(s[i], l);
    rhs[row] = l == 1 ? 1.0 : 0.0;
  }

  auto c = solve_dense(std::move(a), std::move(rhs));
  const double scale = std::pow(h, -m);
  for (auto& v : c) v *= scale;
  return c;
}

JumpEstimate jump_estimate(const Stencil& st, std::span<const double> values, int m) {
  if (values.size() != st.size()) {
    throw std::invalid_argument("jump_estimate: value count differs from stencil size");
  }
  const auto c = annihilation_coefficients(st, m);
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * values[i];
  return {std::pow(st.h(), m - 1) * sum, JumpVariant::interior};
}

JumpEstimate boundary_jump_estimate(Sample lone, Sample center, Sample same_near, Sample same_far) {
  const bool lone_left = lone.x < center.x;
  const auto opposite = [&](double x) { return lone_left ? x > center.x : x < center.x; };
  if (lone.x == center.x || !opposite(same_near.x) || !opposite(same_far.x) ||
      same_near.x == same_far.x) {
    throw std::invalid_argument("boundary stencil needs one sample on one side of the center "
                                "and two distinct samples on the other");
  }
  // Derivative at the center of the quadratic through center, near, far.
  const double d1 = (same_near.f - center.f) / (same_near.x - center.x);
  const double d12 = (same_far.f - same_near.f) / (same_far.x - same_near.x);
  const double d2 = (d12 - d1) / (same_far.x - center.x);
  const double slope_inside = d1 + d2 * (center.x - same_near.x);
  const double slope_lone = (center.f - lone.f) / (center.x - lone.x);
  if (lone_left) return {slope_inside - slope_lone, JumpVariant::boundary_left};
  return {slope_lone - slope_inside, JumpVariant::boundary_right};
}

std::optional<JumpEstimate> line_jump_estimate(std::span<const Sample> line, Sample center) {
  const auto mid = std::lower_bound(line.begin(), line.end(), center.x,
                                    [](const Sample& s, double x) { return s.x < x; });
  auto right = mid;
  if (right != line.end() && right->x == center.x) ++right;
  const auto left_count = static_cast<std::size_t>(mid - line.begin());
  const auto right_count = static_cast<std::size_t>(line.end() - right);

  if (left_count >= 2 && right_count >= 2) {
    const Sample pts[5] = {*(mid - 2), *(mid - 1), center, *right, *(right + 1)};
    std::vector<double> xs(5);
    std::vector<double> fs(5);
    for (std::size_t i = 0; i < 5; ++i) {
      xs[i] = pts[i].x;
      fs[i] = pts[i].f;
    }
    return jump_estimate(Stencil(std::move(xs), center.x), fs, kAnnihilationOrder);
  }
  if (left_count == 1 && right_count >= 2) {
    return boundary_jump_estimate(*(mid - 1), center, *right, *(right + 1));
  }
  if (right_count == 1 && left_count >= 2) {
    return boundary_jump_estimate(*right, center, *(mid - 1), *(mid - 2));
  }
  return std::nullopt;
}

}  // namespace hpsg
