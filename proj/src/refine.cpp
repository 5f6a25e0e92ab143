#include "hpsg/refine.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

namespace hpsg {
namespace {

// Evaluated knots grouped by axis line: knots that agree on every component
// except one. Buckets are keyed by a hash of the other components and
// verified on lookup.
class LineIndex {
 public:
  explicit LineIndex(std::size_t dim) : buckets_(dim) {}

  void add(const MultiKnot& k, double value) {
    const auto id = static_cast<std::uint32_t>(knots_.size());
    knots_.push_back(k);
    values_.push_back(value);
    for (std::size_t d = 0; d < k.dim(); ++d) buckets_[d][line_hash(k, d)].push_back(id);
  }

  std::vector<Sample> samples(const MultiKnot& k, std::size_t d) const {
    std::vector<Sample> out;
    const auto it = buckets_[d].find(line_hash(k, d));
    if (it == buckets_[d].end()) return out;
    for (const auto id : it->second) {
      const auto& other = knots_[id];
      if (other[d] == k[d] || !same_line(other, k, d)) continue;
      out.push_back({position(other[d]), values_[id]});
    }
    std::sort(out.begin(), out.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
    return out;
  }

 private:
  static std::size_t line_hash(const MultiKnot& k, std::size_t d) {
    std::size_t h = 0xcbf29ce484222325ULL ^ d;
    for (std::size_t e = 0; e < k.dim(); ++e) {
      if (e == d) continue;
      const auto v = (static_cast<std::uint64_t>(k[e].index) << 6) ^
                     static_cast<std::uint64_t>(k[e].level);
      h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  static bool same_line(const MultiKnot& a, const MultiKnot& b, std::size_t d) {
    for (std::size_t e = 0; e < a.dim(); ++e) {
      if (e != d && !(a[e] == b[e])) return false;
    }
    return true;
  }

  std::vector<std::unordered_map<std::size_t, std::vector<std::uint32_t>>> buckets_;
  std::vector<MultiKnot> knots_;
  std::vector<double> values_;
};

int increment_degree(const Knot1D& k, int parent_degree, int p_max) {
  if (k.level == 0) return 0;
  return std::max(1, std::min({parent_degree + 1, p_max, k.level}));
}

struct Candidate {
  MultiKnot knot;
  std::size_t parent = 0;  // index into the grid's node list
  std::size_t axis = 0;
};

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::linear: return "linear";
    case Strategy::highest: return "highest";
    case Strategy::greedy: return "greedy";
    case Strategy::kink: return "kink";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "linear") return Strategy::linear;
  if (name == "highest") return Strategy::highest;
  if (name == "greedy") return Strategy::greedy;
  if (name == "kink") return Strategy::kink;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (expected linear, highest, greedy or kink)");
}

void RefineConfig::validate() const {
  if (dim == 0) throw std::invalid_argument("dim: must be positive");
  if (!(w_max > 0.0)) throw std::invalid_argument("w_max: must be positive");
  if (!(w_kink > 0.0)) throw std::invalid_argument("w_kink: must be positive");
  if (p_max < 1) throw std::invalid_argument("p_max: must be at least 1");
  if (q_min < 0) throw std::invalid_argument("q_min: must be non-negative");
  if (q_max < 0) throw std::invalid_argument("q_max: must be non-negative");
  if (q_min > q_max) throw std::invalid_argument("q_min: must not exceed q_max");
  if (!domain.lo.empty() || !domain.hi.empty()) {
    if (domain.lo.size() != dim || domain.hi.size() != dim) {
      throw std::invalid_argument("domain: dimension differs from dim");
    }
    for (std::size_t d = 0; d < dim; ++d) {
      if (!(domain.lo[d] < domain.hi[d])) throw std::invalid_argument("domain: empty interval");
    }
  }
}

Box RefineConfig::resolved_domain() const {
  return domain.lo.empty() ? Box::reference(dim) : domain;
}

DumpMeta RefineConfig::meta() const {
  return {to_string(strategy), w_max, w_kink, p_max, q_min, q_max};
}

EvaluationError::EvaluationError(std::vector<double> point, const std::string& what)
    : std::runtime_error(fmt::format("evaluation failed at ({:.17g}): {}",
                                     fmt::join(point, ", "), what)),
      point_(std::move(point)) {}

std::vector<int> selection_highest(const MultiKnot& child, int p_max) {
  std::vector<int> p(child.dim());
  for (std::size_t d = 0; d < child.dim(); ++d) {
    const int l = child[d].level;
    p[d] = l == 0 ? 0 : std::max(1, std::min(p_max, l));
  }
  return p;
}

std::vector<int> selection_linear(const MultiKnot& child) {
  std::vector<int> p(child.dim());
  for (std::size_t d = 0; d < child.dim(); ++d) p[d] = child[d].level == 0 ? 0 : 1;
  return p;
}

std::vector<int> selection_greedy(const MultiKnot& child, std::span<const int> parent_degrees,
                                  std::size_t d, int p_max) {
  std::vector<int> p(parent_degrees.begin(), parent_degrees.end());
  p.at(d) = increment_degree(child[d], parent_degrees[d], p_max);
  return p;
}

double greedy_score(const SparseGrid& grid, const MultiKnot& parent, std::size_t d, int p) {
  const GridNode* node = grid.find(parent);
  if (node == nullptr) throw std::invalid_argument("greedy_score: parent not in grid");
  if (d >= parent.dim()) throw std::invalid_argument("greedy_score: axis out of range");
  if (p < 1 || !is_admissible_degree(parent[d].level, p)) {
    throw std::invalid_argument(
        fmt::format("greedy_score: degree {} not admissible on level {}", p, parent[d].level));
  }
  BasisND trial = node->basis;
  trial.set_degree(d, p);

  double score = 0.0;
  for (const auto& c : children(parent[d])) {
    const MultiKnot child = parent.with(d, c);
    const auto value = grid.cached_value(child);
    if (!value) throw std::invalid_argument("greedy_score: child has not been evaluated");
    const auto y = child.position();
    score = std::max(score, std::abs(grid.evaluate_reference(y, parent, trial) - *value));
  }
  return score;
}

std::vector<double> greedy_scores(const SparseGrid& grid, const MultiKnot& parent, std::size_t d,
                                  int p_max) {
  std::vector<double> out;
  const int top = std::min(p_max, parent[d].level);
  for (int p = 1; p <= top; ++p) out.push_back(greedy_score(grid, parent, d, p));
  return out;
}

std::vector<int> modification_greedy(SparseGrid& grid, const MultiKnot& parent, int p_max) {
  for (std::size_t d = 0; d < parent.dim(); ++d) {
    if (parent[d].level < 2 || children(parent[d]).empty()) continue;
    const auto scores = greedy_scores(grid, parent, d, p_max);
    const auto best = std::min_element(scores.begin(), scores.end()) - scores.begin();
    grid.set_degree(parent, d, static_cast<int>(best) + 1);
  }
  return grid.find(parent)->basis.degrees();
}

KinkSelection selection_kink(const MultiKnot& child, std::span<const int> parent_degrees,
                             std::size_t d, int stage, std::span<const Sample> line,
                             double child_value, int p_max, double w_kink) {
  KinkSelection out;
  out.degrees = selection_greedy(child, parent_degrees, d, p_max);
  if (stage <= 2) return out;

  const auto estimate = line_jump_estimate(line, {position(child[d]), child_value});
  if (!estimate) {
    out.degrees[d] = 1;
    return out;
  }
  out.eta = std::abs(estimate->value);
  if (*out.eta > w_kink) {
    out.degrees[d] = 1;
    out.kink = true;
  }
  return out;
}

BuildResult build(const Function& f, const RefineConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Box domain = cfg.resolved_domain();
  const std::size_t dim = cfg.dim;

  BuildResult result{SparseGrid(dim, domain), {}};
  SparseGrid& grid = result.grid;
  BuildReport& report = result.report;
  LineIndex lines(dim);

  auto evaluate = [&](const MultiKnot& k) {
    if (const auto cached = grid.cached_value(k)) return *cached;
    const auto x = domain.from_reference(k.position());
    double v = 0.0;
    try {
      v = f(x);
    } catch (const std::exception& e) {
      throw EvaluationError(x, e.what());
    }
    if (!std::isfinite(v)) throw EvaluationError(x, "non-finite function value");
    grid.cache_value(k, v);
    if (cfg.strategy == Strategy::kink) lines.add(k, v);
    ++report.evaluations;
    return v;
  };

  const MultiKnot root = MultiKnot::root(dim);
  const double root_value = evaluate(root);
  grid.insert(GridNode{root, root_value, BasisND(root, std::vector<int>(dim, 0)), root_value});
  report.accepted_per_stage.push_back(1);

  for (int q = 1; q <= cfg.q_max; ++q) {
    const auto active = grid.stages()[static_cast<std::size_t>(q - 1)];
    std::vector<Candidate> candidates;
    std::unordered_map<MultiKnot, std::size_t, MultiKnotHash> seen;
    for (const std::size_t pi : active) {
      const MultiKnot parent = grid.nodes()[pi].knot;
      for (auto& [child, axis] : multi_children(parent)) {
        evaluate(child);
        if (seen.emplace(child, candidates.size()).second) {
          candidates.push_back({std::move(child), pi, axis});
        }
      }
      if (cfg.strategy == Strategy::greedy) modification_greedy(grid, parent, cfg.p_max);
    }

    // Surpluses are all taken before any stage-q node is stored.
    std::vector<double> weights(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      weights[i] = grid.compute_surplus(candidates[i].knot, *grid.cached_value(candidates[i].knot));
    }

    std::size_t accepted = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!(q <= cfg.q_min || std::abs(weights[i]) >= cfg.w_max)) continue;
      const auto& c = candidates[i];
      const auto parent_degrees = grid.nodes()[c.parent].basis.degrees();
      const double value = *grid.cached_value(c.knot);
      std::vector<int> degrees;
      switch (cfg.strategy) {
        case Strategy::linear: degrees = selection_linear(c.knot); break;
        case Strategy::highest: degrees = selection_highest(c.knot, cfg.p_max); break;
        case Strategy::greedy:
          degrees = selection_greedy(c.knot, parent_degrees, c.axis, cfg.p_max);
          break;
        case Strategy::kink: {
          const auto line = lines.samples(c.knot, c.axis);
          auto sel = selection_kink(c.knot, parent_degrees, c.axis, q, line, value, cfg.p_max,
                                    cfg.w_kink);
          if (sel.kink) ++report.kinks_detected;
          degrees = std::move(sel.degrees);
          break;
        }
      }
      grid.insert(GridNode{c.knot, weights[i], BasisND(c.knot, degrees), value});
      ++accepted;
    }
    report.accepted_per_stage.push_back(accepted);
    if (accepted == 0) break;
  }

  report.knots = grid.size();
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace hpsg
