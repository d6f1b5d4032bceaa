#pragma once

// Experiment reports and their CSV / JSON forms.
//
// CSV: RFC 4180, header row then one line per row, the report table only.
// JSON: one object with keys in the order schema_version, artifact_version,
// experiment, seed, config, summary, columns, rows, notes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pacshift/core.hpp"

namespace pacshift::harness {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

/// Non-negative integers are always stored as uint64 so that a JSON
/// round trip restores the same alternative.
using Cell = std::variant<std::int64_t, std::uint64_t, double, bool, std::string>;

template <class T>
Cell cell(T v) {
  if constexpr (std::is_same_v<T, bool>) {
    return Cell(v);
  } else if constexpr (std::is_integral_v<T>) {
    if constexpr (std::is_signed_v<T>) {
      if (v < 0) return Cell(static_cast<std::int64_t>(v));
    }
    return Cell(static_cast<std::uint64_t>(v));
  } else if constexpr (std::is_floating_point_v<T>) {
    return Cell(static_cast<double>(v));
  } else {
    return Cell(std::string(v));
  }
}

using Fields = std::vector<std::pair<std::string, Cell>>;

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  Fields config;
  Fields summary;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  void add_row(std::vector<Cell> row) {
    require(row.size() == columns.size(), "report: row width differs from the header");
    rows.push_back(std::move(row));
  }

  const Cell* find_summary(const std::string& key) const {
    for (const auto& [k, v] : summary) {
      if (k == key) return &v;
    }
    return nullptr;
  }

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Shortest round-trip text; non-finite values as Infinity, -Infinity, NaN.
inline std::string to_text(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string to_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return to_text(v);
        } else {
          return std::to_string(v);
        }
      },
      c);
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void csv_line(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
}

}  // namespace detail

inline std::string emit_csv(const ExperimentReport& report) {
  std::string out;
  detail::csv_line(out, report.columns);
  for (const auto& row : report.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const auto& c : row) fields.push_back(to_text(c));
    detail::csv_line(out, fields);
  }
  return out;
}

/// Records of an RFC 4180 document, header included. Quoted fields may
/// contain commas, doubled quotes and line breaks.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool at_field_start = true;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && at_field_start) {
      quoted = true;
      at_field_start = false;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      at_field_start = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      at_field_start = true;
    } else {
      field += c;
      at_field_start = false;
    }
  }
  require(!quoted, "csv: unterminated quoted field");
  if (!at_field_start || !record.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

// ---------------------------------------------------------------------------
// JSON

using Json = nlohmann::ordered_json;

inline Json to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return Json(to_text(v));
        }
        return Json(v);
      },
      c);
}

inline Cell cell_from_json(const Json& j) {
  switch (j.type()) {
    case Json::value_t::boolean:
      return j.get<bool>();
    case Json::value_t::number_unsigned:
      return j.get<std::uint64_t>();
    case Json::value_t::number_integer:
      return j.get<std::int64_t>();
    case Json::value_t::number_float:
      return j.get<double>();
    case Json::value_t::string: {
      const auto s = j.get<std::string>();
      if (s == "NaN") return std::numeric_limits<double>::quiet_NaN();
      if (s == "Infinity") return std::numeric_limits<double>::infinity();
      if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
      return s;
    }
    default:
      throw InvalidArgument("json: unsupported cell type");
  }
}

inline Json fields_to_json(const Fields& fields) {
  Json out = Json::object();
  for (const auto& [k, v] : fields) out[k] = to_json(v);
  return out;
}

inline Fields fields_from_json(const Json& j) {
  Fields out;
  for (const auto& [k, v] : j.items()) out.emplace_back(k, cell_from_json(v));
  return out;
}

inline Json report_to_json(const ExperimentReport& report) {
  Json out = Json::object();
  out["schema_version"] = kSchemaVersion;
  out["artifact_version"] = kArtifactVersion;
  out["experiment"] = report.experiment;
  out["seed"] = report.seed;
  out["config"] = fields_to_json(report.config);
  out["summary"] = fields_to_json(report.summary);
  out["columns"] = report.columns;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r = Json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    rows.push_back(std::move(r));
  }
  out["rows"] = std::move(rows);
  out["notes"] = report.notes;
  return out;
}

inline std::string emit_json(const ExperimentReport& report) { return report_to_json(report).dump(2) + "\n"; }

inline ExperimentReport parse_json(const std::string& text) {
  const Json j = Json::parse(text);
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw InvalidArgument("json: unsupported schema_version");
  ExperimentReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config = fields_from_json(j.at("config"));
  r.summary = fields_from_json(j.at("summary"));
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<Cell> cells;
    for (const auto& c : row) cells.push_back(cell_from_json(c));
    r.rows.push_back(std::move(cells));
  }
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

inline std::string emit(const ExperimentReport& report, const std::string& format) {
  if (format == "csv") return emit_csv(report);
  if (format == "json") return emit_json(report);
  throw InvalidArgument("format must be csv or json");
}

}  // namespace pacshift::harness
