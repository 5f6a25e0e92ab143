#include "hpsg/refine.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "hpsg/bench.hpp"
#include "hpsg/grid_io.hpp"
#include "test_support.hpp"

namespace hpsg {
namespace {

constexpr Strategy kAll[] = {Strategy::linear, Strategy::highest, Strategy::greedy,
                             Strategy::kink};

RefineConfig config(Strategy s, std::size_t dim, double w_max, int q_max) {
  RefineConfig c;
  c.strategy = s;
  c.dim = dim;
  c.w_max = w_max;
  c.q_max = q_max;
  return c;
}

BuildResult build_test_function(const TestFunction& tf, Strategy s, double w_max, int q_max) {
  auto c = config(s, tf.dim(), w_max, q_max);
  c.domain = tf.domain();
  return build(tf.as_function(), c);
}

std::string dump_text(const SparseGrid& g, const DumpMeta& meta = {}) {
  std::ostringstream os;
  write_dump(os, dump(g, meta));
  return os.str();
}

double smooth2(std::span<const double> x) { return std::sin(2.0 * x[0] + 1.0) * std::cos(x[1]); }

// Regular grid up to stage q plus the values of every stage-(q+1) child.
SparseGrid grid_with_evaluated_children(std::size_t dim, int q, const Function& f) {
  auto g = testing::regular_grid(dim, q, f, testing::capped_degrees(2));
  for (const auto i : g.stages()[static_cast<std::size_t>(q)]) {
    for (const auto& c : multi_children(g.nodes()[i].knot)) {
      g.cache_value(c.knot, f(c.knot.position()));
    }
  }
  return g;
}

TEST(RefineTest, StrategyNames) {
  for (const auto s : kAll) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_THROW(parse_strategy("best"), std::invalid_argument);
}

TEST(RefineTest, ConfigValidation) {
  auto c = config(Strategy::greedy, 2, 1e-3, 5);
  EXPECT_NO_THROW(c.validate());
  c.q_min = 6;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(Strategy::greedy, 2, 0.0, 5);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(Strategy::greedy, 2, 1e-3, 5);
  c.p_max = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(Strategy::greedy, 2, 1e-3, 5);
  c.domain = Box::unit(3);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(build(smooth2, config(Strategy::greedy, 0, 1e-3, 3)), std::invalid_argument);
}

TEST(RefineTest, ZeroStagesGivesRootOnly) {
  auto c = config(Strategy::greedy, 2, 1e-3, 0);
  c.q_min = 0;
  const auto r = build(smooth2, c);
  EXPECT_EQ(r.grid.size(), 1u);
  EXPECT_EQ(r.report.evaluations, 1u);
}

TEST(RefineTest, MinimumStageAcceptsEverything) {
  // A huge threshold still keeps all four stage-1 children.
  const auto r = build(smooth2, config(Strategy::greedy, 2, 1e9, 5));
  EXPECT_EQ(r.report.accepted_per_stage, (std::vector<std::size_t>{1, 4, 0}));
  EXPECT_EQ(r.grid.size(), 5u);
}

TEST(RefineTest, ConstantStopsAtStageTwo) {
  for (const auto s : kAll) {
    auto c = config(s, 2, 1e-3, 25);
    const auto r = build([](std::span<const double>) { return 3.5; }, c);
    EXPECT_EQ(r.report.accepted_per_stage, (std::vector<std::size_t>{1, 4, 0})) << to_string(s);
    EXPECT_EQ(r.grid.size(), 5u);
  }
}

TEST(RefineTest, SelectionExamples) {
  EXPECT_EQ(selection_highest(MultiKnot({{3, 1}, {1, 1}}), 6), (std::vector<int>{3, 1}));
  EXPECT_EQ(selection_highest(MultiKnot({{8, 1}, {0, 1}}), 6), (std::vector<int>{6, 0}));
  EXPECT_EQ(selection_highest(MultiKnot({{2, 1}, {2, 2}}), 6), (std::vector<int>{2, 2}));
  EXPECT_EQ(selection_linear(MultiKnot({{5, 1}, {3, 1}})), (std::vector<int>{1, 1}));
  EXPECT_EQ(selection_linear(MultiKnot::root(2)), (std::vector<int>{0, 0}));

  const MultiKnot child({{3, 1}, {2, 1}});
  EXPECT_EQ(selection_greedy(child, std::vector<int>{2, 2}, 0, 6), (std::vector<int>{3, 2}));
  const MultiKnot deep({{7, 1}, {2, 1}});
  EXPECT_EQ(selection_greedy(deep, std::vector<int>{6, 1}, 0, 6), (std::vector<int>{6, 1}));
  EXPECT_EQ(selection_greedy(child, std::vector<int>{4, 1}, 0, 6), (std::vector<int>{3, 1}));
  // Level-1 children of a root component get degree 1.
  const MultiKnot first({{1, 2}, {0, 1}});
  EXPECT_EQ(selection_greedy(first, std::vector<int>{0, 0}, 0, 6), (std::vector<int>{1, 0}));
}

TEST(RefineTest, KinkSelectionDropsDegreeAtKink) {
  const auto tf = TestFunction::kink1d();
  auto f = [&](double x) { return tf(std::vector<double>{x}); };
  // Child at -0.4375 (level 5); the kink at -0.45 lies in its left cell.
  const MultiKnot child({{5, 5}});
  ASSERT_EQ(child.position()[0], -0.4375);
  std::vector<Sample> line;
  for (const double x : {-0.5625, -0.5, -0.375, -0.3125}) line.push_back({x, f(x)});
  const auto sel =
      selection_kink(child, std::vector<int>{4}, 0, 5, line, f(-0.4375), 6, 1.0);
  ASSERT_TRUE(sel.eta.has_value());
  EXPECT_NEAR(*sel.eta, std::numbers::pi / 1.45, 0.1);
  EXPECT_TRUE(sel.kink);
  EXPECT_EQ(sel.degrees, (std::vector<int>{1}));
}

TEST(RefineTest, KinkSelectionIncrementsOnSmoothData) {
  const MultiKnot child({{8, 100}});
  const double x = child.position()[0];
  const double h = std::ldexp(1.0, -7);
  std::vector<Sample> line;
  for (const double t : {x - 2 * h, x - h, x + h, x + 2 * h}) line.push_back({t, std::sin(t)});
  const auto sel = selection_kink(child, std::vector<int>{4}, 0, 8, line, std::sin(x), 6, 1.0);
  ASSERT_TRUE(sel.eta.has_value());
  EXPECT_LT(*sel.eta, 1e-2);
  EXPECT_FALSE(sel.kink);
  EXPECT_EQ(sel.degrees, (std::vector<int>{5}));
}

TEST(RefineTest, KinkSelectionSkipsEarlyStagesAndSparseLines) {
  const MultiKnot child({{2, 1}});
  const std::vector<Sample> none;
  const auto early = selection_kink(child, std::vector<int>{1}, 0, 2, none, 0.0, 6, 1.0);
  EXPECT_FALSE(early.eta.has_value());
  EXPECT_EQ(early.degrees, (std::vector<int>{2}));
  const MultiKnot deeper({{3, 1}});
  const std::vector<Sample> sparse{{-1.0, 0.0}, {-0.5, 0.0}};
  const auto fallback = selection_kink(deeper, std::vector<int>{2}, 0, 3, sparse, 0.0, 6, 1.0);
  EXPECT_FALSE(fallback.eta.has_value());
  EXPECT_EQ(fallback.degrees, (std::vector<int>{1}));
}

TEST(RefineTest, GreedyScoreMatchesBruteForce) {
  const auto g = grid_with_evaluated_children(2, 4, smooth2);
  int checked = 0;
  for (const auto i : g.stages()[4]) {
    const auto& parent = g.nodes()[i].knot;
    for (std::size_t d = 0; d < 2; ++d) {
      if (parent[d].level < 1) continue;
      const auto scores = greedy_scores(g, parent, d, 6);
      ASSERT_EQ(scores.size(), static_cast<std::size_t>(std::min(6, parent[d].level)));
      for (int p = 1; p <= static_cast<int>(scores.size()); ++p) {
        SparseGrid copy = g;
        copy.set_degree(parent, d, p);
        double want = 0.0;
        double flat = 0.0;
        for (const auto& c : children(parent[d])) {
          const MultiKnot child = parent.with(d, c);
          const auto y = child.position();
          const double f = smooth2(y);
          want = std::max(want, std::abs(copy.evaluate_reference(y) - f));
          flat = std::max(flat, std::abs(copy.evaluate_exhaustive(y) - f));
        }
        EXPECT_EQ(scores[static_cast<std::size_t>(p - 1)], want);
        EXPECT_NEAR(scores[static_cast<std::size_t>(p - 1)], flat, 1e-13);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(RefineTest, GreedyScoreLeavesGridUnchanged) {
  const auto g = grid_with_evaluated_children(2, 3, smooth2);
  const auto before = dump_text(g);
  const auto& parent = g.nodes()[g.stages()[3].front()].knot;
  for (std::size_t d = 0; d < 2; ++d) {
    if (parent[d].level >= 1) greedy_scores(g, parent, d, 6);
  }
  EXPECT_EQ(dump_text(g), before);
}

TEST(RefineTest, GreedyScoreErrors) {
  auto g = testing::regular_grid(1, 3, [](std::span<const double> x) { return std::sin(x[0]); });
  const MultiKnot parent({{3, 1}});
  EXPECT_THROW(greedy_score(g, parent, 0, 2), std::invalid_argument);  // children not evaluated
  g.cache_value(MultiKnot({{4, 1}}), 0.0);
  g.cache_value(MultiKnot({{4, 2}}), 0.0);
  EXPECT_NO_THROW(greedy_score(g, parent, 0, 2));
  EXPECT_THROW(greedy_score(g, parent, 0, 4), std::invalid_argument);
  EXPECT_THROW(greedy_score(g, parent, 1, 1), std::invalid_argument);
  EXPECT_THROW(greedy_score(g, MultiKnot({{5, 1}}), 0, 1), std::invalid_argument);
}

TEST(RefineTest, GreedyScoreZeroForLinearData) {
  // f linear along the axis: the hat plus linear ancestors reproduce it.
  auto f = [](std::span<const double> x) { return 0.5 + 2.0 * x[0] + std::cos(x[1]); };
  const auto g = grid_with_evaluated_children(2, 4, f);
  for (const auto i : g.stages()[4]) {
    const auto& parent = g.nodes()[i].knot;
    if (parent[0].level < 2) continue;
    EXPECT_LE(greedy_score(g, parent, 0, 1), 1e-12);
  }
}

TEST(RefineProperty, GreedyModificationIsLocallyOptimal) {
  auto g = grid_with_evaluated_children(2, 5, smooth2);
  for (const auto i : g.stages()[5]) {
    const auto parent = g.nodes()[i].knot;
    const auto chosen = modification_greedy(g, parent, 6);
    for (std::size_t d = 0; d < 2; ++d) {
      if (parent[d].level < 2) continue;
      const auto scores = greedy_scores(g, parent, d, 6);
      const double at_choice = scores[static_cast<std::size_t>(chosen[d] - 1)];
      for (std::size_t p = 0; p < scores.size(); ++p) {
        EXPECT_LE(at_choice, scores[p]);
        // Ties go to the smaller degree.
        if (static_cast<int>(p) + 1 < chosen[d]) EXPECT_LT(at_choice, scores[p]);
      }
    }
  }
  for (const auto& n : g.nodes()) {
    const auto y = n.knot.position();
    EXPECT_NEAR(g.evaluate_reference(y), n.value, 1e-12);
  }
}

TEST(RefineProperty, GreedyDegreesGrowWithLevelOnSmoothData) {
  auto c = config(Strategy::greedy, 1, 1e-12, 10);
  const auto r = build([](std::span<const double> x) { return std::sin(1.3 * x[0] + 0.2); }, c);
  std::vector<double> sum(7, 0.0);
  std::vector<int> count(7, 0);
  for (const auto& n : r.grid.nodes()) {
    const int l = n.knot[0].level;
    if (l > 6) continue;
    sum[static_cast<std::size_t>(l)] += n.basis.degrees()[0];
    ++count[static_cast<std::size_t>(l)];
  }
  double prev = 0.0;
  for (std::size_t l = 1; l <= 6; ++l) {
    ASSERT_GT(count[l], 0);
    const double mean = sum[l] / count[l];
    EXPECT_GT(mean, prev) << "level " << l;
    prev = mean;
  }
  EXPECT_GE(prev, 5.0);
}

TEST(RefineProperty, ExactAtKnotsForEveryStrategy) {
  const auto tf = TestFunction::genz_c(2);
  for (const auto s : kAll) {
    const auto r = build_test_function(tf, s, 1e-3, 10);
    for (const auto& n : r.grid.nodes()) {
      const auto y = n.knot.position();
      EXPECT_LE(std::abs(r.grid.evaluate_reference(y) - n.value), 1e-12 * (1 + std::abs(n.value)));
    }
  }
}

TEST(RefineProperty, ParentClosure) {
  const auto tf = TestFunction::sobol_g(3);
  for (const auto s : kAll) {
    const auto r = build_test_function(tf, s, 1e-2, 8);
    const auto& g = r.grid;
    for (const auto& n : g.nodes()) {
      if (n.stage() == 0) continue;
      bool has_parent = false;
      for (std::size_t d = 0; d < 3 && !has_parent; ++d) {
        if (const auto p = parent(n.knot[d])) has_parent = g.contains(n.knot.with(d, *p));
      }
      EXPECT_TRUE(has_parent);
    }
  }
}

TEST(RefineProperty, EvaluationEconomy) {
  const auto tf = TestFunction::genz_c(3);
  for (const auto s : kAll) {
    std::size_t calls = 0;
    std::set<std::vector<double>> distinct;
    auto c = config(s, 3, 1e-3, 12);
    c.domain = tf.domain();
    const auto r = build(
        [&](std::span<const double> x) {
          ++calls;
          distinct.emplace(x.begin(), x.end());
          return tf(x);
        },
        c);
    EXPECT_EQ(calls, distinct.size());
    EXPECT_EQ(calls, r.report.evaluations);
    EXPECT_EQ(r.grid.cache_size(), r.report.evaluations);
    EXPECT_GE(r.report.evaluations, r.report.knots);
    EXPECT_EQ(r.report.knots, r.grid.size());
  }
}

TEST(RefineProperty, Deterministic) {
  const auto tf = TestFunction::curve2d();
  for (const auto s : kAll) {
    const auto a = build_test_function(tf, s, 1e-2, 10);
    const auto b = build_test_function(tf, s, 1e-2, 10);
    EXPECT_EQ(dump_text(a.grid), dump_text(b.grid)) << to_string(s);
  }
}

TEST(RefineProperty, ThresholdMonotonicity) {
  const auto tf = TestFunction::genz_c(2);
  for (const auto s : kAll) {
    const auto coarse = build_test_function(tf, s, 1e-2, 25);
    const auto fine = build_test_function(tf, s, 1e-3, 25);
    for (const auto& n : coarse.grid.nodes()) {
      EXPECT_TRUE(fine.grid.contains(n.knot)) << to_string(s);
    }
    EXPECT_GT(fine.grid.size(), coarse.grid.size());
  }
}

TEST(RefineTest, EvaluationErrorsCarryThePoint) {
  auto c = config(Strategy::linear, 1, 1e-3, 5);
  c.domain = Box::unit(1);
  try {
    build([](std::span<const double> x) -> double {
      if (x[0] == 1.0) throw std::runtime_error("boom");
      return x[0];
    }, c);
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.point(), (std::vector<double>{1.0}));
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
  EXPECT_THROW(build([](std::span<const double>) { return NAN; }, c), EvaluationError);
}

TEST(RefineTest, KinkStrategyDetectsKinks) {
  const auto r = build_test_function(TestFunction::kink1d(), Strategy::kink, 1e-6, 12);
  EXPECT_GT(r.report.kinks_detected, 0u);
  const auto smooth = build([](std::span<const double> x) { return std::sin(x[0]); },
                            config(Strategy::kink, 1, 1e-8, 10));
  EXPECT_EQ(smooth.report.kinks_detected, 0u);
}

}  // namespace
}  // namespace hpsg
