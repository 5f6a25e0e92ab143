#include "hpsg/grid_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hpsg {
namespace {

constexpr const char* kMagic = "hpsg-grid";
constexpr int kVersion = 1;

std::string real(double v) { return fmt::format("{:.17g}", v); }

template <typename T>
std::string join(const std::vector<T>& v, bool as_real = false) {
  std::string out;
  for (const auto& x : v) {
    if (!out.empty()) out += ' ';
    if constexpr (std::is_floating_point_v<T>) {
      out += as_real ? real(x) : fmt::format("{}", x);
    } else {
      out += fmt::format("{}", x);
    }
  }
  return out;
}

// Whitespace tokenizer over a single line that reports errors at that line.
class LineReader {
 public:
  LineReader(std::string text, std::size_t line) : line_(line) {
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) tokens_.push_back(tok);
  }

  bool done() const { return pos_ == tokens_.size(); }

  const std::string& word() {
    if (done()) fail("unexpected end of line");
    return tokens_[pos_++];
  }

  void expect(const std::string& w) {
    const auto& got = word();
    if (got != w) fail("expected '" + w + "', found '" + got + "'");
  }

  template <typename T>
  T number() {
    const auto& tok = word();
    T v{};
    const auto* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end) fail("bad number '" + tok + "'");
    return v;
  }

  template <typename T>
  std::vector<T> numbers(std::size_t n) {
    std::vector<T> out(n);
    for (auto& v : out) v = number<T>();
    return out;
  }

  void finish() {
    if (!done()) fail("trailing token '" + tokens_[pos_] + "'");
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw DumpFormatError("line", line_, what);
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

class DumpParser {
 public:
  explicit DumpParser(std::istream& is) : is_(is) {}

  LineReader next(const char* what) {
    std::string text;
    while (std::getline(is_, text)) {
      ++line_;
      if (text.find_first_not_of(" \t\r") != std::string::npos) return {text, line_};
    }
    throw DumpFormatError("line", line_ + 1, std::string("truncated dump, missing ") + what);
  }

 private:
  std::istream& is_;
  std::size_t line_ = 0;
};

}  // namespace

GridDump dump(const SparseGrid& grid, const DumpMeta& meta) {
  GridDump out;
  out.dim = grid.dim();
  out.meta = meta;
  out.domain = grid.domain();
  out.nodes.reserve(grid.size());
  for (const auto& n : grid.nodes()) {
    NodeRecord r;
    for (const auto& k : n.knot.components()) {
      r.levels.push_back(k.level);
      r.indices.push_back(k.index);
    }
    r.positions = n.knot.position();
    r.weight = n.weight;
    r.degrees = n.basis.degrees();
    r.value = n.value;
    out.nodes.push_back(std::move(r));
  }
  return out;
}

SparseGrid load(const GridDump& d) {
  SparseGrid grid(d.dim, d.domain);
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    const auto& r = d.nodes[i];
    try {
      if (r.levels.size() != d.dim || r.indices.size() != d.dim ||
          r.positions.size() != d.dim || r.degrees.size() != d.dim) {
        throw std::invalid_argument("field length differs from dimension");
      }
      std::vector<Knot1D> comps(d.dim);
      for (std::size_t k = 0; k < d.dim; ++k) comps[k] = {r.levels[k], r.indices[k]};
      MultiKnot knot(std::move(comps));
      const auto pos = knot.position();
      for (std::size_t k = 0; k < d.dim; ++k) {
        if (pos[k] != r.positions[k]) {
          throw std::invalid_argument("position does not match (level, index)");
        }
      }
      grid.insert(GridNode{knot, r.weight, BasisND(knot, r.degrees), r.value});
    } catch (const std::exception& e) {
      throw DumpFormatError("record", i + 1, e.what());
    }
  }
  return grid;
}

void write_dump(std::ostream& os, const GridDump& d) {
  os << kMagic << ' ' << kVersion << '\n';
  os << "dim " << d.dim << '\n';
  os << "strategy " << d.meta.strategy << '\n';
  os << "w_max " << real(d.meta.w_max) << '\n';
  os << "w_kink " << real(d.meta.w_kink) << '\n';
  os << "p_max " << d.meta.p_max << '\n';
  os << "q_min " << d.meta.q_min << '\n';
  os << "q_max " << d.meta.q_max << '\n';
  os << "domain_lo " << join(d.domain.lo, true) << '\n';
  os << "domain_hi " << join(d.domain.hi, true) << '\n';
  os << "nodes " << d.nodes.size() << '\n';
  for (const auto& r : d.nodes) {
    os << "node l " << join(r.levels) << " j " << join(r.indices) << " x "
       << join(r.positions, true) << " w " << real(r.weight) << " p " << join(r.degrees)
       << " f " << real(r.value) << '\n';
  }
  os << "end\n";
}

GridDump read_dump(std::istream& is) {
  DumpParser p(is);
  GridDump d;

  auto head = p.next("header");
  head.expect(kMagic);
  if (head.number<int>() != kVersion) head.fail("unsupported dump version");
  head.finish();

  auto line = p.next("dim");
  line.expect("dim");
  d.dim = line.number<std::size_t>();
  if (d.dim == 0) line.fail("dimension must be positive");
  line.finish();

  line = p.next("strategy");
  line.expect("strategy");
  d.meta.strategy = line.word();
  line.finish();

  auto real_field = [&](const char* key, double& out) {
    auto l = p.next(key);
    l.expect(key);
    out = l.number<double>();
    l.finish();
  };
  auto int_field = [&](const char* key, int& out) {
    auto l = p.next(key);
    l.expect(key);
    out = l.number<int>();
    l.finish();
  };
  real_field("w_max", d.meta.w_max);
  real_field("w_kink", d.meta.w_kink);
  int_field("p_max", d.meta.p_max);
  int_field("q_min", d.meta.q_min);
  int_field("q_max", d.meta.q_max);

  line = p.next("domain_lo");
  line.expect("domain_lo");
  d.domain.lo = line.numbers<double>(d.dim);
  line.finish();
  line = p.next("domain_hi");
  line.expect("domain_hi");
  d.domain.hi = line.numbers<double>(d.dim);
  line.finish();

  line = p.next("nodes");
  line.expect("nodes");
  const auto count = line.number<std::size_t>();
  line.finish();

  d.nodes.reserve(std::min<std::size_t>(count, 1 << 16));
  for (std::size_t i = 0; i < count; ++i) {
    auto l = p.next("node record");
    NodeRecord r;
    l.expect("node");
    l.expect("l");
    r.levels = l.numbers<int>(d.dim);
    l.expect("j");
    r.indices = l.numbers<std::int64_t>(d.dim);
    l.expect("x");
    r.positions = l.numbers<double>(d.dim);
    l.expect("w");
    r.weight = l.number<double>();
    l.expect("p");
    r.degrees = l.numbers<int>(d.dim);
    l.expect("f");
    r.value = l.number<double>();
    l.finish();
    d.nodes.push_back(std::move(r));
  }

  line = p.next("end marker");
  line.expect("end");
  line.finish();
  return d;
}

void save_grid(const std::string& path, const SparseGrid& grid, const DumpMeta& meta) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_dump(os, dump(grid, meta));
  if (!os) throw std::runtime_error("failed writing grid dump to '" + path + "'");
}

SparseGrid load_grid(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return load(read_dump(is));
}

}  // namespace hpsg
