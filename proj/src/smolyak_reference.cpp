#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hpsg/sparse_grid.hpp"

namespace hpsg {
namespace {

struct AxisStencil {
  double point[2] = {0.0, 0.0};
  double weight[2] = {1.0, 0.0};
  int count = 1;
};

// Two-point linear stencil on the uniform level-l grid of [-1,1].
AxisStencil axis_stencil(int level, double y) {
  AxisStencil s;
  if (level == 0) return s;
  const std::int64_t cells = std::int64_t{1} << level;
  const double h = 2.0 / static_cast<double>(cells);
  auto cell = static_cast<std::int64_t>(std::floor((y + 1.0) / h));
  cell = std::max<std::int64_t>(0, std::min(cell, cells - 1));
  const double left = -1.0 + static_cast<double>(cell) * h;
  const double t = (y - left) / h;
  s.point[0] = left;
  s.point[1] = left + h;
  s.weight[0] = 1.0 - t;
  s.weight[1] = t;
  s.count = 2;
  return s;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void for_each_level_vector(std::size_t dim, int max_sum, std::vector<int>& levels,
                           std::size_t d, int used, const auto& visit) {
  if (d == dim) {
    visit(levels, used);
    return;
  }
  for (int l = 0; used + l <= max_sum; ++l) {
    levels[d] = l;
    for_each_level_vector(dim, max_sum, levels, d + 1, used + l, visit);
  }
}

}  // namespace

double tensor_interpolate_p1(const Function& f, std::span<const int> levels,
                             std::span<const double> y) {
  const std::size_t dim = levels.size();
  if (y.size() != dim) throw std::invalid_argument("level vector and point differ in size");
  std::vector<AxisStencil> axes(dim);
  for (std::size_t d = 0; d < dim; ++d) axes[d] = axis_stencil(levels[d], y[d]);

  double sum = 0.0;
  std::vector<double> corner(dim);
  std::vector<int> pick(dim, 0);
  while (true) {
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      corner[d] = axes[d].point[pick[d]];
      w *= axes[d].weight[pick[d]];
    }
    sum += w * f(corner);
    std::size_t d = 0;
    for (; d < dim; ++d) {
      if (++pick[d] < axes[d].count) break;
      pick[d] = 0;
    }
    if (d == dim) break;
  }
  return sum;
}

double smolyak_reference_p1(const Function& f, int q, std::span<const double> y) {
  if (q < 0) throw std::invalid_argument("level budget must be non-negative");
  const auto dim = y.size();
  const int n = static_cast<int>(dim);
  double sum = 0.0;
  std::vector<int> levels(dim, 0);
  for_each_level_vector(dim, q, levels, 0, 0, [&](const std::vector<int>& l, int total) {
    if (total < q - n + 1) return;
    const int k = q - total;
    const double c = (k % 2 == 0 ? 1.0 : -1.0) * binomial(n - 1, k);
    sum += c * tensor_interpolate_p1(f, l, y);
  });
  return sum;
}

}  // namespace hpsg
