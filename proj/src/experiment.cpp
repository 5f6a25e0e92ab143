#include "hpsg/experiment.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "hpsg/grid_io.hpp"

namespace hpsg {
namespace {

struct Key {
  const char* name;
  const char* help;
  bool list;
};

constexpr Key kKeys[] = {
    {"function", "curve2d | genz-c | sobol-g | kink1d", false},
    {"dim", "number of variables", false},
    {"strategy", "linear | highest | greedy | kink | all (repeatable)", true},
    {"wmax", "surplus threshold (repeatable, comma separated)", true},
    {"wkink", "kink detection threshold", false},
    {"pmax", "maximum polynomial degree", false},
    {"qmin", "stages accepted unconditionally", false},
    {"qmax", "maximum stage", false},
    {"seed", "seed for test and kink points", false},
    {"test-points", "number of random test points", false},
    {"kink-points", "number of points on the kink locus", false},
    {"repeats", "builds averaged per timing", false},
    {"out", "CSV file to append results to", false},
    {"dump-grid", "write grid dumps to this path", false},
};

const Key* find_key(const std::string& name) {
  for (const auto& k : kKeys) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& field, const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(fmt::format("{}: '{}' is not a valid number", field, text));
  }
  return v;
}

// Values for a key replace whatever an earlier source set.
void apply(ExperimentSpec& spec, const std::string& key, const std::vector<std::string>& values) {
  if (values.empty()) throw ConfigError(key + ": missing value");
  const std::string& v = values.back();
  try {
    if (key == "function") {
      spec.function = parse_function_kind(v);
    } else if (key == "dim") {
      const auto d = parse_number<long long>(key, v);
      if (d <= 0) throw ConfigError("dim: must be a positive integer, got " + v);
      spec.dim = static_cast<std::size_t>(d);
    } else if (key == "strategy") {
      spec.strategies.clear();
      for (const auto& s : values) {
        if (s == "all") {
          spec.strategies = {Strategy::linear, Strategy::highest, Strategy::greedy, Strategy::kink};
        } else {
          const auto st = parse_strategy(s);
          if (std::find(spec.strategies.begin(), spec.strategies.end(), st) ==
              spec.strategies.end()) {
            spec.strategies.push_back(st);
          }
        }
      }
    } else if (key == "wmax") {
      spec.w_max.clear();
      for (const auto& s : values) spec.w_max.push_back(parse_number<double>(key, s));
    } else if (key == "wkink") {
      spec.w_kink = parse_number<double>(key, v);
    } else if (key == "pmax") {
      spec.p_max = parse_number<int>(key, v);
    } else if (key == "qmin") {
      spec.q_min = parse_number<int>(key, v);
    } else if (key == "qmax") {
      spec.q_max = parse_number<int>(key, v);
    } else if (key == "seed") {
      spec.seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "test-points") {
      spec.test_points = parse_number<std::size_t>(key, v);
    } else if (key == "kink-points") {
      spec.kink_points = parse_number<std::size_t>(key, v);
    } else if (key == "repeats") {
      spec.repeats = parse_number<int>(key, v);
    } else if (key == "out") {
      spec.out = v;
    } else if (key == "dump-grid") {
      spec.dump_grid = v;
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::size_t ExperimentSpec::resolved_dim() const {
  if (dim) return *dim;
  return function == FunctionKind::kink1d ? 1 : 2;
}

int ExperimentSpec::resolved_q_max() const {
  if (q_max) return *q_max;
  return function == FunctionKind::curve2d ? 30 : 25;
}

void ExperimentSpec::validate() const {
  const std::size_t n = resolved_dim();
  if (n == 0) throw ConfigError("dim: must be a positive integer");
  if (function == FunctionKind::curve2d && n != 2) throw ConfigError("dim: curve2d requires dim 2");
  if (function == FunctionKind::kink1d && n != 1) throw ConfigError("dim: kink1d requires dim 1");
  if (strategies.empty()) throw ConfigError("strategy: at least one strategy is required");
  if (w_max.empty()) throw ConfigError("wmax: the threshold sweep is empty");
  for (const double w : w_max) {
    if (!(w > 0.0)) throw ConfigError("wmax: thresholds must be positive");
  }
  if (!(w_kink > 0.0)) throw ConfigError("wkink: must be positive");
  if (p_max < 1) throw ConfigError("pmax: must be at least 1");
  if (q_min < 0) throw ConfigError("qmin: must be non-negative");
  if (resolved_q_max() < q_min) throw ConfigError("qmax: must be at least qmin");
  if (test_points == 0) throw ConfigError("test-points: must be positive");
  if (repeats < 1) throw ConfigError("repeats: must be at least 1");
}

RefineConfig ExperimentSpec::refine_config(Strategy s, double w) const {
  RefineConfig cfg;
  cfg.strategy = s;
  cfg.w_max = w;
  cfg.w_kink = w_kink;
  cfg.p_max = p_max;
  cfg.q_min = q_min;
  cfg.q_max = resolved_q_max();
  cfg.dim = resolved_dim();
  cfg.domain = TestFunction::make(function, cfg.dim).domain();
  return cfg;
}

ExperimentSpec parse_config_text(const std::string& text, ExperimentSpec base) {
  std::istringstream is(text);
  std::string line;
  std::size_t number = 0;
  std::map<std::string, std::vector<std::string>> values;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("config line {}: expected key = value", number));
    }
    const std::string key = trim(line.substr(0, eq));
    const Key* known = find_key(key);
    if (known == nullptr) throw ConfigError(fmt::format("config line {}: unknown key '{}'", number, key));
    auto items = known->list ? split_list(line.substr(eq + 1))
                             : std::vector<std::string>{trim(line.substr(eq + 1))};
    if (items.empty() || items.back().empty()) {
      throw ConfigError(fmt::format("config line {}: missing value for '{}'", number, key));
    }
    auto& slot = values[key];
    if (known->list) {
      slot.insert(slot.end(), items.begin(), items.end());
    } else {
      slot = std::move(items);
    }
  }
  for (const auto& [key, v] : values) apply(base, key, v);
  return base;
}

ExperimentSpec parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Adaptive hp sparse grid interpolation experiments", "hpsg"};
  std::map<std::string, std::vector<std::string>> flags;
  for (const auto& k : kKeys) {
    auto* opt = app.add_option(std::string("--") + k.name, flags[k.name], k.help);
    if (k.list) {
      opt->delimiter(',');
    } else {
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }
  std::string config_path;
  app.add_option("--config", config_path, "flat key = value file; flags override it");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  ExperimentSpec spec;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw ConfigError("config: cannot open '" + config_path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    spec = parse_config_text(buf.str(), spec);
  }
  for (const auto& k : kKeys) {
    const auto& v = flags[k.name];
    if (!v.empty()) apply(spec, k.name, v);
  }
  spec.validate();
  return spec;
}

std::string csv_header() {
  return "function,dim,strategy,w_max,w_kink,p_max,q_max,num_knots,num_evals,err_inf,err_l2,"
         "build_seconds,eval_seconds,seed";
}

std::string to_csv(const ResultRow& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.function, r.dim, r.strategy,
                     real(r.w_max), real(r.w_kink), r.p_max, r.q_max, r.num_knots, r.num_evals,
                     real(r.err_inf), real(r.err_l2), real(r.build_seconds),
                     real(r.eval_seconds), r.seed);
}

void append_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  bool need_header = true;
  {
    std::ifstream is(path);
    std::string first;
    if (is && std::getline(is, first) && !first.empty()) {
      if (first != csv_header()) {
        throw std::runtime_error("'" + path + "' has a different CSV header");
      }
      need_header = false;
    }
  }
  std::ofstream os(path, std::ios::app);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for appending");
  if (need_header) os << csv_header() << '\n';
  for (const auto& r : rows) os << to_csv(r) << '\n';
  os.flush();
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

std::string dump_path(const std::string& base, const std::string& strategy, std::size_t i,
                      std::size_t count) {
  if (count <= 1) return base;
  const std::filesystem::path p(base);
  auto name = fmt::format("{}_{}_{}{}", p.stem().string(), strategy, i, p.extension().string());
  return (p.parent_path() / name).string();
}

std::vector<ResultRow> run(const ExperimentSpec& spec, std::ostream* log) {
  spec.validate();
  const std::size_t dim = spec.resolved_dim();
  const TestFunction tf = TestFunction::make(spec.function, dim);
  const Function f = tf.as_function();
  const PointSet random = sample_test_points(tf, spec.test_points, spec.seed);
  const PointSet kink = spec.kink_points > 0
                            ? sample_kink_points(tf, spec.kink_points, spec.seed + 1)
                            : PointSet{dim, {}};
  if (log) {
    *log << fmt::format("# {} dim={} test_points={} kink_points={} (err_l2 averages over both)\n",
                        tf.name(), dim, random.size(), kink.size());
  }

  const std::size_t count = spec.strategies.size() * spec.w_max.size();
  std::vector<ResultRow> rows;
  rows.reserve(count);
  for (const auto strategy : spec.strategies) {
    for (const double w : spec.w_max) {
      const RefineConfig cfg = spec.refine_config(strategy, w);
      ResultRow row{tf.name(), dim, to_string(strategy), w, spec.w_kink, spec.p_max, cfg.q_max,
                    0, 0, std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, spec.seed};
      try {
        double build_total = 0.0;
        double eval_total = 0.0;
        for (int rep = 0; rep < spec.repeats; ++rep) {
          auto t0 = std::chrono::steady_clock::now();
          BuildResult built = build(f, cfg);
          auto t1 = std::chrono::steady_clock::now();
          const ErrorReport err = error_metrics(tf, built.grid, random, kink);
          auto t2 = std::chrono::steady_clock::now();
          build_total += std::chrono::duration<double>(t1 - t0).count();
          eval_total += std::chrono::duration<double>(t2 - t1).count();
          if (rep == 0) {
            row.num_knots = built.report.knots;
            row.num_evals = built.report.evaluations;
            row.err_inf = err.err_inf;
            row.err_l2 = err.err_l2;
            if (!spec.dump_grid.empty()) {
              save_grid(dump_path(spec.dump_grid, row.strategy, rows.size(), count), built.grid,
                        cfg.meta());
            }
          }
        }
        row.build_seconds = build_total / spec.repeats;
        row.eval_seconds = eval_total / spec.repeats;
      } catch (const std::exception& e) {
        if (log) *log << fmt::format("# {} w_max={} failed: {}\n", row.strategy, real(w), e.what());
      }
      if (log) {
        *log << fmt::format("{:8} w_max={:<8g} knots={:<8} evals={:<8} err_inf={:.3e} err_l2={:.3e} "
                            "build={:.3f}s\n",
                            row.strategy, w, row.num_knots, row.num_evals, row.err_inf, row.err_l2,
                            row.build_seconds);
      }
      rows.push_back(std::move(row));
    }
  }
  if (!spec.out.empty()) append_csv(spec.out, rows);
  return rows;
}

}  // namespace hpsg
