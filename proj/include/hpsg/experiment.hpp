#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpsg/bench.hpp"
#include "hpsg/refine.hpp"

namespace hpsg {

/// One sweep: every strategy crossed with every threshold.
struct ExperimentSpec {
  FunctionKind function = FunctionKind::genz_c;
  /// 2 by default, 1 for kink1d.
  std::optional<std::size_t> dim;
  std::vector<Strategy> strategies{Strategy::greedy};
  std::vector<double> w_max;
  double w_kink = 1.0;
  int p_max = kDefaultMaxDegree;
  int q_min = 1;
  /// 25 by default, 30 for curve2d.
  std::optional<int> q_max;
  std::uint64_t seed = 1;
  std::size_t test_points = kDefaultTestPoints;
  std::size_t kink_points = kDefaultKinkPoints;
  int repeats = 1;
  std::string out;
  std::string dump_grid;

  std::size_t resolved_dim() const;
  int resolved_q_max() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
  RefineConfig refine_config(Strategy s, double w_max) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help was given; what() holds the usage text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse command line arguments (without the program name). A --config file
/// is read first and flags override its values. Throws ConfigError.
ExperimentSpec parse_config(const std::vector<std::string>& args);

/// Apply flat `key = value` lines (flag names without dashes, '#' comments)
/// on top of `base`. Throws ConfigError with the line number of bad entries.
ExperimentSpec parse_config_text(const std::string& text, ExperimentSpec base = {});

struct ResultRow {
  std::string function;
  std::size_t dim = 0;
  std::string strategy;
  double w_max = 0.0;
  double w_kink = 0.0;
  int p_max = 0;
  int q_max = 0;
  std::size_t num_knots = 0;
  std::size_t num_evals = 0;
  double err_inf = 0.0;
  double err_l2 = 0.0;
  double build_seconds = 0.0;
  double eval_seconds = 0.0;
  std::uint64_t seed = 0;
};

std::string csv_header();
std::string to_csv(const ResultRow& row);

/// Append rows to `path`, writing the header only to a new or empty file.
/// Throws std::runtime_error if an existing header differs.
void append_csv(const std::string& path, const std::vector<ResultRow>& rows);

/// Run the sweep. Rows come out in strategy-major order. A failed build is
/// reported on `log` and yields a row with NaN errors; the sweep continues.
/// Writes the CSV and grid dumps when the spec names paths.
std::vector<ResultRow> run(const ExperimentSpec& spec, std::ostream* log = nullptr);

/// Dump path for row `i` of `count`: the given path for a single row,
/// otherwise `<stem>_<strategy>_<i><ext>`.
std::string dump_path(const std::string& base, const std::string& strategy, std::size_t i,
                      std::size_t count);

}  // namespace hpsg
