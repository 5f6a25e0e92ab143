#include "hpsg/knot_tree.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hpsg {

std::int64_t knots_on_level(int level) {
  if (level < 0 || level > kMaxLevel) return 0;
  if (level == 0) return 1;
  if (level == 1) return 2;
  return std::int64_t{1} << (level - 1);
}

bool is_valid(const Knot1D& k) {
  return k.level >= 0 && k.level <= kMaxLevel && k.index >= 1 &&
         k.index <= knots_on_level(k.level);
}

void validate(const Knot1D& k) {
  if (!is_valid(k)) {
    throw std::invalid_argument("invalid knot (level " + std::to_string(k.level) +
                                ", index " + std::to_string(k.index) + ")");
  }
}

double position(const Knot1D& k) {
  validate(k);
  if (k.level == 0) return 0.0;
  if (k.level == 1) return static_cast<double>(2 * k.index - 3);
  return std::ldexp(static_cast<double>(2 * k.index - 1), 1 - k.level) - 1.0;
}

std::vector<Knot1D> children(const Knot1D& k) {
  validate(k);
  if (k.level == 0) return {{1, 1}, {1, 2}};
  if (k.level == 1) return {{2, k.index}};
  if (k.level == kMaxLevel) return {};
  return {{k.level + 1, 2 * k.index - 1}, {k.level + 1, 2 * k.index}};
}

std::optional<Knot1D> parent(const Knot1D& k) {
  validate(k);
  if (k.level == 0) return std::nullopt;
  if (k.level == 1) return Knot1D{0, 1};
  if (k.level == 2) return Knot1D{1, k.index};
  return Knot1D{k.level - 1, (k.index + 1) / 2};
}

std::vector<Knot1D> ancestors(const Knot1D& k) {
  std::vector<Knot1D> out;
  out.reserve(static_cast<std::size_t>(k.level));
  for (auto p = parent(k); p; p = parent(*p)) out.push_back(*p);
  return out;
}

Support1D support(const Knot1D& k) {
  validate(k);
  if (k.level == 0) return {-1.0, 1.0};
  if (k.level == 1) return k.index == 1 ? Support1D{-1.0, 0.0} : Support1D{0.0, 1.0};
  const double x = position(k);
  const double h = std::ldexp(1.0, 1 - k.level);
  return {x - h, x + h};
}

std::optional<Knot1D> knot_at(double x, int max_level) {
  if (x == 0.0) return Knot1D{0, 1};
  if (x == -1.0) return Knot1D{1, 1};
  if (x == 1.0) return Knot1D{1, 2};
  if (!(x > -1.0 && x < 1.0)) return std::nullopt;
  for (int l = 2; l <= std::min(max_level, kMaxLevel); ++l) {
    const double scaled = std::ldexp(x + 1.0, l - 1);
    if (scaled != std::floor(scaled)) continue;
    const auto odd = static_cast<std::int64_t>(scaled);
    if (odd % 2 == 1) return Knot1D{l, (odd + 1) / 2};
  }
  return std::nullopt;
}

MultiKnot::MultiKnot(std::vector<Knot1D> dims) : dims_(std::move(dims)) {
  for (const auto& k : dims_) {
    validate(k);
    level_sum_ += k.level;
  }
}

MultiKnot MultiKnot::root(std::size_t dim) {
  return MultiKnot(std::vector<Knot1D>(dim, Knot1D{0, 1}));
}

MultiKnot MultiKnot::with(std::size_t d, const Knot1D& k) const {
  validate(k);
  MultiKnot out = *this;
  out.level_sum_ += k.level - out.dims_.at(d).level;
  out.dims_[d] = k;
  return out;
}

std::vector<double> MultiKnot::position() const {
  std::vector<double> x(dims_.size());
  for (std::size_t d = 0; d < dims_.size(); ++d) x[d] = hpsg::position(dims_[d]);
  return x;
}

std::size_t MultiKnotHash::operator()(const MultiKnot& k) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto& c : k.components()) {
    const auto v = (static_cast<std::uint64_t>(c.index) << 6) ^
                   static_cast<std::uint64_t>(c.level);
    h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::vector<AxisChild> multi_children(const MultiKnot& k) {
  std::vector<AxisChild> out;
  out.reserve(2 * k.dim());
  for (std::size_t d = 0; d < k.dim(); ++d) {
    for (const auto& c : children(k[d])) out.push_back({k.with(d, c), d});
  }
  return out;
}

}  // namespace hpsg
