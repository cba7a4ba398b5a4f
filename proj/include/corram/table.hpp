#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "corram/common.hpp"

namespace corram {

// One output cell.  Non-finite numbers are never emitted as numbers; writers
// expect the producer to store them as the strings "inf"/"-inf"/"nan".
using Cell = std::variant<double, long long, bool, std::string>;

inline Cell numeric_cell(double x) {
  if (std::isfinite(x)) return Cell{x};
  if (std::isnan(x)) return Cell{std::string("nan")};
  return Cell{std::string(x > 0 ? "inf" : "-inf")};
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;  // echoed config

  std::vector<Cell>& add_row() {
    rows.emplace_back();
    rows.back().reserve(columns.size());
    return rows.back();
  }
};

inline std::string format_double_17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) return format_double_17(std::get<double>(cell));
  if (std::holds_alternative<long long>(cell)) return std::to_string(std::get<long long>(cell));
  if (std::holds_alternative<bool>(cell)) return std::get<bool>(cell) ? "true" : "false";
  return std::get<std::string>(cell);
}

// CSV: '#'-prefixed metadata lines, a snake_case header row, then data rows
// with floats at 17 significant digits.
inline void write_csv(std::ostream& out, const Table& table) {
  for (const auto& [key, value] : table.metadata) {
    out << "# " << key << " = " << value << "\n";
  }
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << table.columns[c] << (c + 1 == table.columns.size() ? "\n" : ",");
  }
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << format_cell(row[c]) << (c + 1 == row.size() ? "\n" : ",");
    }
  }
}

inline nlohmann::json cell_to_json(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) return std::get<double>(cell);
  if (std::holds_alternative<long long>(cell)) return std::get<long long>(cell);
  if (std::holds_alternative<bool>(cell)) return std::get<bool>(cell);
  return std::get<std::string>(cell);
}

// JSON mirror of the CSV: same fields plus a schema_version string.
inline void write_json(std::ostream& out, const Table& table) {
  nlohmann::json j;
  j["schema_version"] = "1";
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : table.metadata) meta[key] = value;
  j["metadata"] = meta;
  j["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& cell : row) jr.push_back(cell_to_json(cell));
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << "\n";
}

}  // namespace corram
