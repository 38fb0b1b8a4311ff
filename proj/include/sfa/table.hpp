#pragma once

// Deterministic CSV/JSON emission: 12 significant digits, fixed row order,
// resolved configuration embedded in every document.

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sfa {

using Cell = std::variant<double, std::string>;

struct Column {
  std::string name;
  std::string unit;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct Document {
  std::string command;
  nlohmann::ordered_json config;
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  std::vector<Table> tables;
};

/// "%.12g"; non-finite values print as nan / inf / -inf.
std::string format_number(double value);

/// `#` header lines (command, config, notes), then each table as a header
/// row plus data rows; tables after the first are introduced by "# <name>".
void write_csv(std::ostream& os, const Document& doc);

/// Same payload as JSON; every column carries its unit.
void write_json(std::ostream& os, const Document& doc);

}  // namespace sfa
