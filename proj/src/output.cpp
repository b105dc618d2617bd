#include "pie/output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pie {
namespace {

// JSON string escaping for meta values and string cells (our values are
// plain identifiers/flag echoes; control characters are escaped defensively).
std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string json_value(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return "null";
  if (std::holds_alternative<double>(v)) {
    double d = std::get<double>(v);
    if (std::isnan(d)) return "null";
    return format_real(d);
  }
  if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return "\"" + json_escape(std::get<std::string>(v)) + "\"";
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_value(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return "";
  if (std::holds_alternative<double>(v)) return format_real(std::get<double>(v));
  if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return std::get<std::string>(v);
}

std::string render_csv(const OutputRecord& rec) {
  std::string out;
  out += "# schema=" + rec.schema + "\n";
  for (const auto& [k, v] : rec.meta) out += "# " + k + "=" + v + "\n";
  for (size_t i = 0; i < rec.columns.size(); ++i) {
    if (i) out += ",";
    out += rec.columns[i];
  }
  out += "\n";
  for (const auto& row : rec.rows) {
    if (row.size() != rec.columns.size())
      throw std::logic_error("OutputRecord: row width does not match columns");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += format_value(row[i]);
    }
    out += "\n";
  }
  return out;
}

std::string render_json(const OutputRecord& rec) {
  std::string out = "{\n  \"schema\": \"" + json_escape(rec.schema) + "\",\n  \"meta\": {";
  for (size_t i = 0; i < rec.meta.size(); ++i) {
    out += i ? ",\n    " : "\n    ";
    out += "\"" + json_escape(rec.meta[i].first) + "\": \"" + json_escape(rec.meta[i].second) + "\"";
  }
  out += rec.meta.empty() ? "},\n" : "\n  },\n";
  out += "  \"rows\": [";
  for (size_t r = 0; r < rec.rows.size(); ++r) {
    if (rec.rows[r].size() != rec.columns.size())
      throw std::logic_error("OutputRecord: row width does not match columns");
    out += r ? ",\n    " : "\n    ";
    out += "{";
    for (size_t i = 0; i < rec.columns.size(); ++i) {
      if (i) out += ", ";
      out += "\"" + json_escape(rec.columns[i]) + "\": " + json_value(rec.rows[r][i]);
    }
    out += "}";
  }
  out += rec.rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

}  // namespace pie
