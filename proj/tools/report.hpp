/*
 * Copyright 2026 The qoptics Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Tabular report with PASS/FAIL checks, written as CSV or JSON.

#ifndef QOPTICS_TOOLS_REPORT_HPP
#define QOPTICS_TOOLS_REPORT_HPP

#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace qoptics::cli {

using Cell = std::variant<double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Check {
  std::string name;
  double value;
  double expected;
  double tolerance;  // |value - expected| <= tolerance unless `pass` is set explicitly
  bool pass;
  std::string note;
};

inline Check check_close(std::string name, double value, double expected, double tol, std::string note = "") {
  return {std::move(name), value, expected, tol, std::abs(value - expected) <= tol, std::move(note)};
}

inline Check check_below(std::string name, double value, double bound, std::string note = "") {
  return {std::move(name), value, bound, 0.0, value <= bound, std::move(note)};
}

struct Report {
  std::string schema;  // e.g. "qoptics.nport-table/1"
  std::deque<Table> tables;  // stable references from table()
  std::vector<Check> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  Table& table(const std::string& name, std::vector<std::string> columns) {
    tables.push_back({name, std::move(columns), {}});
    return tables.back();
  }
};

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline Table checks_table(const Report& r) {
  Table t{"checks", {"check", "value", "expected", "tolerance", "status", "note"}, {}};
  for (const auto& c : r.checks)
    t.add({c.name, c.value, c.expected, c.tolerance, std::string(c.pass ? "PASS" : "FAIL"), c.note});
  return t;
}

/// One block per table: "# table: <name>", header row, data rows, blank line.
inline void write_csv(std::ostream& os, const Report& r) {
  os << "# schema: " << r.schema << "\n";
  auto emit = [&](const Table& t) {
    os << "# table: " << t.name << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << "\n";
    }
    os << "\n";
  };
  for (const auto& t : r.tables) emit(t);
  if (!r.checks.empty()) emit(checks_table(r));
}

inline nlohmann::json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return fmt(*d);
  }
  return std::get<std::string>(c);
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["schema"] = r.schema;
  auto tab = [](const Table& t) {
    nlohmann::json o;
    o["columns"] = t.columns;
    o["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& c : row) jr.push_back(json_cell(c));
      o["rows"].push_back(jr);
    }
    return o;
  };
  j["tables"] = nlohmann::json::object();
  for (const auto& t : r.tables) j["tables"][t.name] = tab(t);
  if (!r.checks.empty()) j["tables"]["checks"] = tab(checks_table(r));
  return j;
}

inline void write_json(std::ostream& os, const Report& r) {
  // Doubles are printed in shortest round-trip form and parse back to the CSV values.
  os << to_json(r).dump(2) << "\n";
}

}  // namespace qoptics::cli

#endif  // QOPTICS_TOOLS_REPORT_HPP
