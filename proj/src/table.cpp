#include "sdt/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sdt {

TiePolicy parse_tie_policy(const std::string& s) {
  if (s == "a") return TiePolicy::choose_a;
  if (s == "b") return TiePolicy::choose_b;
  if (s == "random" || s == "randomize") return TiePolicy::randomize;
  throw InputError("unknown tie policy '" + s + "' (expected a, b or random)");
}

std::string to_string(TiePolicy p) {
  switch (p) {
    case TiePolicy::choose_a: return "a";
    case TiePolicy::choose_b: return "b";
    case TiePolicy::randomize: return "random";
  }
  return "?";
}

Panel parse_panel(const std::string& s) {
  if (s == "A" || s == "a") return Panel::A;
  if (s == "B" || s == "b") return Panel::B;
  throw InputError("unknown panel '" + s + "' (expected A or B)");
}

char to_char(Panel p) { return p == Panel::A ? 'A' : 'B'; }

std::string column_key(double column) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", column);
  return buf;
}

void TableOptions::validate() const {
  if (n_list.empty() || columns.empty()) throw InputError("table needs at least one row and one column");
  for (int n : n_list) {
    if (n < 1) throw InputError("sample sizes must be positive");
  }
  for (double c : columns) require_unit_interval(c, "table column");
  if (grid_count < 2) throw InputError("grid density must be at least 2");
  if (!(grid_lo >= 0.0 && grid_hi <= 1.0 && grid_lo < grid_hi)) {
    throw InputError("grid bounds must satisfy 0 <= lo < hi <= 1");
  }
  if (replicates < 1) throw InputError("replicates must be at least 1");
}

ReplicationPlan TableOptions::plan_for(int n, double column) const {
  ReplicationPlan plan;
  plan.replicates = replicates;
  plan.n = n;
  plan.master_seed = seed;
  const auto col = static_cast<std::uint64_t>(std::llround(column * 1e6));
  return plan.for_cell((static_cast<std::uint64_t>(n) << 32) ^ col);
}

double CellTable::at(int n, double column) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] != n) continue;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (std::abs(columns[j] - column) < 1e-9) return value(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  throw InputError("table " + id + " has no cell (" + std::to_string(n) + ", " + column_key(column) + ")");
}

void write_table_csv(std::ostream& out, const CellTable& table, bool full_precision) {
  char buf[64];
  out << "N";
  for (double c : table.columns) out << ',' << column_key(c);
  out << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    out << table.rows[i];
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.4f",
                    table.value(static_cast<Index>(i), static_cast<Index>(j)));
      out << ',' << buf;
    }
    out << '\n';
  }
}

ReferenceTables ReferenceTables::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open reference tables '" + path + "'");
  ReferenceTables out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::string table, n, column, value;
    if (!std::getline(ss, table, ',') || !std::getline(ss, n, ',') || !std::getline(ss, column, ',') ||
        !std::getline(ss, value)) {
      throw InputError("malformed reference line '" + line + "'");
    }
    out.values_[{table, std::stoi(n), column_key(std::stod(column))}] = std::stod(value);
  }
  return out;
}

bool ReferenceTables::has(const std::string& table) const {
  for (const auto& [key, v] : values_) {
    if (std::get<0>(key) == table) return true;
  }
  return false;
}

double ReferenceTables::value(const std::string& table, int n, double column) const {
  const auto it = values_.find({table, n, column_key(column)});
  if (it == values_.end()) {
    throw InputError("no reference value for " + table + " (" + std::to_string(n) + ", " + column_key(column) + ")");
  }
  return it->second;
}

double ReferenceTables::max_abs_deviation(const CellTable& table) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
      const auto it = values_.find({table.id, table.rows[i], column_key(table.columns[j])});
      if (it == values_.end()) continue;
      worst = std::max(worst, std::abs(table.value(static_cast<Index>(i), static_cast<Index>(j)) - it->second));
    }
  }
  return worst;
}

}  // namespace sdt
