#include "hpsg/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hpsg {

bool is_admissible_degree(int level, int degree) {
  if (level == 0) return degree == 0;
  return degree >= 1 && degree <= level;
}

std::vector<double> anchors(const Knot1D& k, int p) {
  validate(k);
  if (p < 2 || p > k.level) {
    throw std::invalid_argument("anchors: degree " + std::to_string(p) +
                                " needs 2 <= p <= level " + std::to_string(k.level));
  }
  const double x = position(k);
  const Support1D s = support(k);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p));
  out.push_back(s.lo);
  out.push_back(s.hi);

  // ancestors() is ordered by decreasing level, so a stable sort keeps the
  // deeper ancestor first on distance ties.
  std::vector<double> rest;
  for (const auto& a : ancestors(k)) {
    const double y = position(a);
    if (y != s.lo && y != s.hi) rest.push_back(y);
  }
  std::stable_sort(rest.begin(), rest.end(), [x](double a, double b) {
    return std::abs(a - x) < std::abs(b - x);
  });
  out.insert(out.end(), rest.begin(), rest.begin() + (p - 2));
  return out;
}

Basis1D::Basis1D(const Knot1D& k, int degree)
    : knot_(k), degree_(degree), node_(position(k)), support_(hpsg::support(k)) {
  if (!is_admissible_degree(k.level, degree)) {
    throw std::invalid_argument("degree " + std::to_string(degree) +
                                " is not admissible on level " + std::to_string(k.level));
  }
  half_width_ = std::ldexp(1.0, 1 - k.level);
  if (degree >= 2) anchors_ = anchors(k, degree);
}

double Basis1D::operator()(double x) const {
  if (degree_ == 0) return 1.0;
  if (!support_.contains(x)) return 0.0;
  if (degree_ == 1) {
    // Level 1 supports have the knot at one end; the formula covers both cases.
    return std::max(0.0, 1.0 - std::abs(x - node_) / half_width_);
  }
  double v = 1.0;
  for (const double a : anchors_) v *= (x - a) / (node_ - a);
  return v;
}

BasisND::BasisND(const MultiKnot& k, std::span<const int> degrees) {
  if (degrees.size() != k.dim()) {
    throw std::invalid_argument("degree vector has " + std::to_string(degrees.size()) +
                                " entries, knot has " + std::to_string(k.dim()));
  }
  axes_.reserve(k.dim());
  for (std::size_t d = 0; d < k.dim(); ++d) axes_.emplace_back(k[d], degrees[d]);
}

std::vector<int> BasisND::degrees() const {
  std::vector<int> out(axes_.size());
  for (std::size_t d = 0; d < axes_.size(); ++d) out[d] = axes_[d].degree();
  return out;
}

void BasisND::set_degree(std::size_t d, int degree) {
  axes_.at(d) = Basis1D(axes_[d].knot(), degree);
}

bool BasisND::in_support(std::span<const double> x) const {
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    if (!axes_[d].support().contains(x[d])) return false;
  }
  return true;
}

double BasisND::operator()(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t d = 0; d < axes_.size() && v != 0.0; ++d) v *= axes_[d](x[d]);
  return v;
}

double eval_basis_1d(const Knot1D& k, int degree, double x) {
  return Basis1D(k, degree)(x);
}

double eval_basis_nd(const MultiKnot& k, std::span<const int> degrees,
                     std::span<const double> x) {
  if (x.size() != k.dim()) {
    throw std::invalid_argument("point has " + std::to_string(x.size()) +
                                " coordinates, knot has " + std::to_string(k.dim()));
  }
  return BasisND(k, degrees)(x);
}

}  // namespace hpsg
