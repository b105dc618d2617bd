#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace pie {

/// Cell value in an output row. monostate marks a not-applicable cell
/// (rendered as an empty CSV field / JSON null).
using Value = std::variant<std::monostate, double, long long, bool, std::string>;

/// Machine-readable result of one CLI command: a flat table plus ordered
/// metadata (params, tool version, command echo). Rows are sorted by their
/// primary key before rendering; all reals are serialized with 17 significant
/// digits so identical inputs give byte-identical output.
struct OutputRecord {
  std::string schema;  ///< PROX | TRAJECTORY | REGION | SWEEP | ERRORS
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;                    ///< each row matches columns
  std::vector<std::pair<std::string, std::string>> meta;   ///< ordered key/value
};

/// 17-significant-digit text form of a double ("%.17g"; nan/inf spelled out).
std::string format_real(double v);

/// Text form of a single cell (CSV conventions; empty for monostate).
std::string format_value(const Value& v);

/// CSV rendering: '# key=value' meta comment lines, a mandatory header row,
/// then the data rows.
std::string render_csv(const OutputRecord& rec);

/// JSON rendering: a single object {"meta": {...}, "rows": [...]} carrying
/// exactly the same serialized values as the CSV form.
std::string render_json(const OutputRecord& rec);

}  // namespace pie
