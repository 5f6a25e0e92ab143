#include "hpsg/sparse_grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hpsg {

Box Box::reference(std::size_t dim) {
  return {std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0)};
}

Box Box::unit(std::size_t dim) {
  return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t d = 0; d < dim(); ++d) {
    if (!(lo[d] <= x[d] && x[d] <= hi[d])) return false;
  }
  return true;
}

std::vector<double> Box::to_reference(std::span<const double> x) const {
  std::vector<double> y(dim());
  for (std::size_t d = 0; d < dim(); ++d) {
    y[d] = std::clamp((2.0 * x[d] - lo[d] - hi[d]) / (hi[d] - lo[d]), -1.0, 1.0);
  }
  return y;
}

std::vector<double> Box::from_reference(std::span<const double> y) const {
  std::vector<double> x(dim());
  for (std::size_t d = 0; d < dim(); ++d) {
    x[d] = std::clamp(0.5 * ((hi[d] - lo[d]) * y[d] + lo[d] + hi[d]), lo[d], hi[d]);
  }
  return x;
}

SparseGrid::SparseGrid(std::size_t dim) : SparseGrid(dim, Box::reference(dim)) {}

SparseGrid::SparseGrid(std::size_t dim, Box domain) : dim_(dim), domain_(std::move(domain)) {
  if (dim_ == 0) throw std::invalid_argument("grid dimension must be positive");
  if (domain_.dim() != dim_ || domain_.hi.size() != dim_) {
    throw std::invalid_argument("domain box dimension does not match grid dimension");
  }
  for (std::size_t d = 0; d < dim_; ++d) {
    if (!(domain_.lo[d] < domain_.hi[d])) {
      throw std::invalid_argument("empty domain interval on axis " + std::to_string(d));
    }
  }
}

const GridNode* SparseGrid::find(const MultiKnot& k) const {
  const auto it = index_.find(k);
  return it == index_.end() ? nullptr : &nodes_[it->second];
}

bool SparseGrid::box_contains(std::size_t node, std::span<const double> y) const {
  const double* lo = box_lo_.data() + node * dim_;
  const double* hi = box_hi_.data() + node * dim_;
  for (std::size_t d = 0; d < dim_; ++d) {
    if (y[d] < lo[d] || y[d] > hi[d]) return false;
  }
  return true;
}

double SparseGrid::evaluate(std::span<const double> x) const {
  if (!domain_.contains(x)) throw std::out_of_range("evaluation point outside the grid domain");
  const auto y = domain_.to_reference(x);
  return evaluate_reference(y);
}

double SparseGrid::evaluate_reference(std::span<const double> y) const {
  if (y.size() != dim_) throw std::invalid_argument("point dimension does not match grid");
  return descend(y, nodes_.size(), nullptr);
}

double SparseGrid::evaluate_reference(std::span<const double> y, const MultiKnot& k,
                                      const BasisND& basis) const {
  if (y.size() != dim_) throw std::invalid_argument("point dimension does not match grid");
  const auto it = index_.find(k);
  if (it == index_.end()) throw std::invalid_argument("basis override for a knot not in grid");
  return descend(y, it->second, &basis);
}

double SparseGrid::descend(std::span<const double> y, std::size_t swapped,
                           const BasisND* basis) const {
  if (nodes_.empty()) return 0.0;
  double sum = 0.0;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (!box_contains(i, y)) continue;
    const auto& b = i == swapped ? *basis : nodes_[i].basis;
    sum += nodes_[i].weight * b(y);
    stack.insert(stack.end(), tree_children_[i].begin(), tree_children_[i].end());
  }
  return sum;
}

double SparseGrid::evaluate_exhaustive(std::span<const double> y) const {
  if (y.size() != dim_) throw std::invalid_argument("point dimension does not match grid");
  double sum = 0.0;
  for (const auto& n : nodes_) sum += n.weight * n.basis(y);
  return sum;
}

double SparseGrid::compute_surplus(const MultiKnot& k, double f_value) const {
  if (k.dim() != dim_) throw std::invalid_argument("knot dimension does not match grid");
  if (contains(k)) throw std::invalid_argument("surplus requested for a stored knot");
  const auto y = k.position();
  return f_value - evaluate_reference(y);
}

void SparseGrid::insert(GridNode node) {
  const MultiKnot& k = node.knot;
  if (k.dim() != dim_ || node.basis.dim() != dim_) {
    throw std::invalid_argument("node dimension does not match grid");
  }
  for (std::size_t d = 0; d < dim_; ++d) {
    if (!(node.basis.axis(d).knot() == k[d])) {
      throw std::invalid_argument("node basis is not aligned with its knot");
    }
  }
  if (contains(k)) throw std::invalid_argument("knot already stored in grid");

  const int stage = k.level_sum();
  std::optional<std::size_t> tree_parent;
  if (nodes_.empty()) {
    if (stage != 0) throw std::invalid_argument("first node must be the root knot");
  } else {
    if (stage < last_stage()) {
      throw std::logic_error("stage " + std::to_string(stage) + " is closed; newest stage is " +
                             std::to_string(last_stage()));
    }
    for (std::size_t d = 0; d < dim_ && !tree_parent; ++d) {
      if (const auto p = parent(k[d])) {
        if (const auto it = index_.find(k.with(d, *p)); it != index_.end()) {
          tree_parent = it->second;
        }
      }
    }
    if (!tree_parent) throw std::invalid_argument("orphan knot: no parent stored in grid");
  }

  const std::size_t i = nodes_.size();
  if (static_cast<int>(stages_.size()) <= stage) stages_.resize(static_cast<std::size_t>(stage) + 1);
  stages_[static_cast<std::size_t>(stage)].push_back(i);
  if (tree_parent) tree_children_[*tree_parent].push_back(i);
  tree_children_.emplace_back();
  for (std::size_t d = 0; d < dim_; ++d) {
    const auto& s = node.basis.axis(d).support();
    box_lo_.push_back(s.lo);
    box_hi_.push_back(s.hi);
  }
  cache_.insert_or_assign(k, node.value);
  index_.emplace(k, i);
  nodes_.push_back(std::move(node));
}

const GridNode& SparseGrid::insert(const MultiKnot& k, std::span<const int> degrees,
                                   double f_value) {
  GridNode node{k, compute_surplus(k, f_value), BasisND(k, degrees), f_value};
  insert(std::move(node));
  return nodes_.back();
}

void SparseGrid::set_degree(const MultiKnot& k, std::size_t d, int degree) {
  const auto it = index_.find(k);
  if (it == index_.end()) throw std::invalid_argument("set_degree: knot not in grid");
  if (d >= dim_) throw std::invalid_argument("set_degree: axis out of range");
  if (!is_admissible_degree(k[d].level, degree)) {
    throw std::invalid_argument("set_degree: degree " + std::to_string(degree) +
                                " not admissible on level " + std::to_string(k[d].level));
  }
  auto& node = nodes_[it->second];
  if (node.stage() != last_stage()) {
    throw std::logic_error("set_degree: only nodes of the newest stage can be modified");
  }
  node.basis.set_degree(d, degree);
}

std::optional<double> SparseGrid::cached_value(const MultiKnot& k) const {
  const auto it = cache_.find(k);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

void SparseGrid::cache_value(const MultiKnot& k, double value) {
  cache_.insert_or_assign(k, value);
}

}  // namespace hpsg
