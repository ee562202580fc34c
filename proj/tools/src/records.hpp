#pragma once

// Flat result records: one JSON object per line, or CSV with a fixed leading
// column order.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace protmeas::cli {

inline constexpr std::uint64_t kSchemaVersion = 1;

using Value = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string>;

/// Ordered key/value pairs; set() replaces in place or appends.
class ResultRecord {
 public:
  ResultRecord& set(const std::string& key, Value value);
  const Value* find(const std::string& key) const;
  /// Numeric field as double; throws std::out_of_range if absent or not numeric.
  double number(const std::string& key) const;

  const std::vector<std::pair<std::string, Value>>& fields() const noexcept { return fields_; }
  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

/// schema_version, command, config_hash, seed, in that order.
ResultRecord make_record(const std::string& command, const std::string& config_hash,
                         std::uint64_t seed);

/// T, pointer_shift, expectation_target, disturbance_prob, entropy_bits,
/// pert_error, validity_indicator.
const std::vector<std::string>& csv_leading_columns();

std::string to_json_line(const ResultRecord& record);
/// Inverse of to_json_line for flat objects.
ResultRecord parse_json_line(const std::string& line);
std::vector<ResultRecord> read_json_lines(std::istream& in);

enum class Format { Json, Csv };

/// CSV header: leading columns, then every other key in order of first
/// appearance. Absent fields are empty cells.
void write_records(std::ostream& out, const std::vector<ResultRecord>& records, Format format);

}  // namespace protmeas::cli
