#include "records.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace protmeas::cli {

using ordered_json = nlohmann::ordered_json;

ResultRecord& ResultRecord::set(const std::string& key, Value value) {
  for (auto& [k, v] : fields_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  fields_.emplace_back(key, std::move(value));
  return *this;
}

const Value* ResultRecord::find(const std::string& key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) {
      return &v;
    }
  }
  return nullptr;
}

double ResultRecord::number(const std::string& key) const {
  const Value* v = find(key);
  if (v == nullptr) {
    throw std::out_of_range("record has no field '" + key + "'");
  }
  if (const auto* d = std::get_if<double>(v)) {
    return *d;
  }
  if (const auto* i = std::get_if<std::int64_t>(v)) {
    return static_cast<double>(*i);
  }
  if (const auto* u = std::get_if<std::uint64_t>(v)) {
    return static_cast<double>(*u);
  }
  throw std::out_of_range("field '" + key + "' is not numeric");
}

ResultRecord make_record(const std::string& command, const std::string& config_hash,
                         std::uint64_t seed) {
  ResultRecord r;
  r.set("schema_version", kSchemaVersion)
      .set("command", command)
      .set("config_hash", config_hash)
      .set("seed", seed);
  return r;
}

const std::vector<std::string>& csv_leading_columns() {
  static const std::vector<std::string> cols{"T",           "pointer_shift",      "expectation_target",
                                             "disturbance_prob", "entropy_bits", "pert_error",
                                             "validity_indicator"};
  return cols;
}

namespace {

ordered_json value_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> ordered_json {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, std::monostate>) {
          return nullptr;
        } else {
          return x;
        }
      },
      v);
}

Value json_value(const ordered_json& j) {
  switch (j.type()) {
    case ordered_json::value_t::null:
      return std::monostate{};
    case ordered_json::value_t::boolean:
      return j.get<bool>();
    case ordered_json::value_t::number_integer:
      return j.get<std::int64_t>();
    case ordered_json::value_t::number_unsigned:
      return j.get<std::uint64_t>();
    case ordered_json::value_t::number_float:
      return j.get<double>();
    case ordered_json::value_t::string:
      return j.get<std::string>();
    default:
      throw std::invalid_argument("record fields must be scalars");
  }
}

std::string csv_cell(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) {
    return "";
  }
  if (const auto* s = std::get_if<std::string>(&v)) {
    if (s->find_first_of(",\"\n") == std::string::npos) {
      return *s;
    }
    std::string q = "\"";
    for (const char c : *s) {
      q += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return q + "\"";
  }
  // Same number formatting as the JSON emitter.
  return value_json(v).dump();
}

}  // namespace

std::string to_json_line(const ResultRecord& record) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : record.fields()) {
    j[k] = value_json(v);
  }
  return j.dump();
}

ResultRecord parse_json_line(const std::string& line) {
  const ordered_json j = ordered_json::parse(line);
  if (!j.is_object()) {
    throw std::invalid_argument("record line is not a JSON object");
  }
  ResultRecord r;
  for (const auto& [k, v] : j.items()) {
    r.set(k, json_value(v));
  }
  return r;
}

std::vector<ResultRecord> read_json_lines(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    out.push_back(parse_json_line(line));
  }
  return out;
}

void write_records(std::ostream& out, const std::vector<ResultRecord>& records, Format format) {
  if (format == Format::Json) {
    for (const auto& r : records) {
      out << to_json_line(r) << '\n';
    }
    return;
  }
  std::vector<std::string> columns = csv_leading_columns();
  for (const auto& r : records) {
    for (const auto& [k, _] : r.fields()) {
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) {
        columns.push_back(k);
      }
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << columns[i];
  }
  out << '\n';
  for (const auto& r : records) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const Value* v = r.find(columns[i]);
      out << (i ? "," : "") << (v ? csv_cell(*v) : std::string());
    }
    out << '\n';
  }
}

}  // namespace protmeas::cli
