#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpsg/sparse_grid.hpp"

namespace hpsg {

/// Build settings echoed into a dump header.
struct DumpMeta {
  std::string strategy = "unknown";
  double w_max = 0.0;
  double w_kink = 0.0;
  int p_max = 0;
  int q_min = 0;
  int q_max = 0;

  friend bool operator==(const DumpMeta&, const DumpMeta&) = default;
};

struct NodeRecord {
  std::vector<int> levels;
  std::vector<std::int64_t> indices;
  std::vector<double> positions;
  double weight = 0.0;
  std::vector<int> degrees;
  double value = 0.0;

  friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

/// Plain-text snapshot of a grid, one record per node in insertion order.
///
///     hpsg-grid 1
///     dim 2
///     strategy greedy
///     w_max 0.001
///     ...
///     domain_lo 0 0
///     domain_hi 1 1
///     nodes 5
///     node l 0 0 j 1 1 x 0 0 w 0.5 p 0 0 f 0.5
///     ...
///     end
///
/// Reals are written with 17 significant digits.
struct GridDump {
  std::size_t dim = 0;
  DumpMeta meta;
  Box domain;
  std::vector<NodeRecord> nodes;

  friend bool operator==(const GridDump&, const GridDump&) = default;
};

/// Malformed dump. `position()` is the 1-based line (read_dump) or node
/// record (load) where the problem was found.
class DumpFormatError : public std::runtime_error {
 public:
  DumpFormatError(const std::string& unit, std::size_t position, const std::string& what)
      : std::runtime_error("grid dump " + unit + " " + std::to_string(position) + ": " + what),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

GridDump dump(const SparseGrid& grid, const DumpMeta& meta = {});

/// Rebuild a grid by re-inserting every record. Throws DumpFormatError for
/// records that are inconsistent or cannot be inserted.
SparseGrid load(const GridDump& dump);

void write_dump(std::ostream& os, const GridDump& dump);
GridDump read_dump(std::istream& is);

void save_grid(const std::string& path, const SparseGrid& grid, const DumpMeta& meta = {});
SparseGrid load_grid(const std::string& path);

}  // namespace hpsg
