#include "sfa/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sfa/errors.hpp"

namespace sfa {

namespace {

using nlohmann::ordered_json;

std::string csv_cell(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) return format_number(*v);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

ordered_json json_cell(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) {
    if (!std::isfinite(*v)) return nullptr;
    // round-trip through the CSV text so both formats carry the same digits
    return std::stod(format_number(*v));
  }
  return std::get<std::string>(c);
}

ordered_json rounded(const ordered_json& j) {
  if (j.is_number_float()) return std::stod(format_number(j.get<double>()));
  if (j.is_structured()) {
    ordered_json out = j;
    for (auto& item : out) item = rounded(item);
    return out;
  }
  return j;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ConfigError("table '" + name + "': row width does not match columns");
  rows.push_back(std::move(row));
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // no negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_csv(std::ostream& os, const Document& doc) {
  os << "# sfa " << doc.command << "\n";
  os << "# config: " << rounded(doc.config).dump() << "\n";
  for (const auto& [key, value] : doc.notes.items()) os << "# " << key << ": " << rounded(value).dump() << "\n";
  bool first = true;
  for (const auto& t : doc.tables) {
    if (!first) os << "# " << t.name << "\n";
    first = false;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      os << (i ? "," : "") << t.columns[i].name;
    }
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << "\n";
    }
  }
}

void write_json(std::ostream& os, const Document& doc) {
  ordered_json j;
  j["command"] = doc.command;
  j["config"] = rounded(doc.config);
  j["notes"] = rounded(doc.notes);
  ordered_json tables = ordered_json::object();
  for (const auto& t : doc.tables) {
    ordered_json cols = ordered_json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
      ordered_json r = ordered_json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      rows.push_back(std::move(r));
    }
    tables[t.name] = {{"columns", std::move(cols)}, {"rows", std::move(rows)}};
  }
  j["tables"] = std::move(tables);
  os << j.dump(2) << "\n";
}

}  // namespace sfa
