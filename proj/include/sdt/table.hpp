#pragma once

// Maximum-regret tables laid out like the published ones: one row per
// sample size N, one column per value of the fixed population parameter.

#include "sdt/engine.hpp"
#include "sdt/types.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace sdt {

struct TableOptions {
  std::vector<int> n_list;
  std::vector<double> columns;
  /// Values per outcome parameter, evenly spaced over [grid_lo, grid_hi].
  std::size_t grid_count = 26;
  double grid_lo = 0.0;
  double grid_hi = 1.0;
  std::size_t replicates = 5000;
  std::uint64_t seed = 20191203;
  SweepOptions sweep;

  void validate() const;
  std::vector<double> grid_values() const { return StateGrid::uniform(grid_count, grid_lo, grid_hi); }

  /// Plan for cell (n, column); the seed is salted by the cell's labels so a
  /// cell's numbers do not depend on which other cells are computed.
  ReplicationPlan plan_for(int n, double column) const;
};

struct CellTable {
  std::string id;
  std::string column_label;
  std::vector<int> rows;
  std::vector<double> columns;
  Matrix<> value;
  /// Monte Carlo standard error at each cell's maximizing state.
  Matrix<> mc_stderr;
  /// Maximizing state per cell, row-major over (row, column).
  std::vector<std::vector<double>> argmax;
  std::vector<std::string> argmax_names;

  double at(int n, double column) const;
};

/// Header "N,<columns...>", one line per N, 4 decimals unless full precision.
void write_table_csv(std::ostream& out, const CellTable& table, bool full_precision = false);

/// Reference values keyed by (table id, N, column label such as "0.1").
class ReferenceTables {
 public:
  /// CSV with header table,n,column,value.
  static ReferenceTables load(const std::string& path);

  bool has(const std::string& table) const;
  double value(const std::string& table, int n, double column) const;

  /// Largest |table cell - reference| over the cells the reference covers.
  double max_abs_deviation(const CellTable& table) const;

 private:
  std::map<std::tuple<std::string, int, std::string>, double> values_;
};

std::string column_key(double column);

}  // namespace sdt
