#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace protmeas::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base + "/" + key; }

std::string join(const std::string& base, std::size_t index) {
  return base + "/" + std::to_string(index);
}

void check_keys(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(where.empty() ? "/" : where, "expected an object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(join(where, key), "unknown field");
    }
  }
}

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) {
    throw ConfigError(where, "expected a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ConfigError(where, "expected a finite number");
  }
  return x;
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? number_at(obj.at(key), join(where, key)) : fallback;
}

std::int64_t integer_at(const json& v, const std::string& where) {
  if (!v.is_number_integer()) {
    throw ConfigError(where, "expected an integer");
  }
  return v.get<std::int64_t>();
}

std::uint64_t unsigned_at(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) {
    return v.get<std::uint64_t>();
  }
  const std::int64_t i = integer_at(v, where);
  if (i < 0) {
    throw ConfigError(where, "expected a non-negative integer");
  }
  return static_cast<std::uint64_t>(i);
}

bool bool_or(const json& obj, const std::string& key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_boolean()) {
    throw ConfigError(join(where, key), "expected true or false");
  }
  return v.get<bool>();
}

std::string string_at(const json& v, const std::string& where) {
  if (!v.is_string()) {
    throw ConfigError(where, "expected a string");
  }
  return v.get<std::string>();
}

// [re, im] or a bare real number.
Complex complex_at(const json& v, const std::string& where) {
  if (v.is_number()) {
    return {number_at(v, where), 0.0};
  }
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError(where, "expected [re, im]");
  }
  return {number_at(v[0], join(where, 0)), number_at(v[1], join(where, 1))};
}

ComplexVector vector_at(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(where, "expected a nonempty list of [re, im] amplitudes");
  }
  ComplexVector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Index>(i)) = complex_at(v[i], join(where, i));
  }
  return out;
}

ComplexMatrix matrix_at(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError(where, "expected a nonempty list of rows");
  }
  const std::size_t n = v.size();
  ComplexMatrix out(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rw = join(where, r);
    if (!v[r].is_array() || v[r].size() != n) {
      throw ConfigError(rw, "expected a row of " + std::to_string(n) + " [re, im] entries");
    }
    for (std::size_t c = 0; c < n; ++c) {
      out(static_cast<Index>(r), static_cast<Index>(c)) = complex_at(v[r][c], join(rw, c));
    }
  }
  return out;
}

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const ComplexVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back(json::array({v(i).real(), v(i).imag()}));
  }
  return out;
}

HermitianOperator hermitian_at(const ComplexMatrix& m, const std::string& where) {
  try {
    return HermitianOperator(m);
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text, const std::string& label) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character.
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    const auto colon = msg.find("syntax error");
    throw ConfigError(label + line_column(text, at),
                      colon == std::string::npos ? msg : msg.substr(colon));
  }
}

json read_file_json(const std::filesystem::path& path, const std::string& where) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(where, "cannot open " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path.string() + ": ");
}

struct Operator {
  HermitianOperator op;
  json canonical;
};

// Shared by the system and observable blocks: a preset, a matrix literal or a
// file holding either {"matrix": ...} or a bare matrix.
ComplexMatrix operator_matrix(const json& block, const std::string& where,
                              const std::filesystem::path& base_dir) {
  const int sources = static_cast<int>(block.contains("preset")) +
                      static_cast<int>(block.contains("matrix")) +
                      static_cast<int>(block.contains("file"));
  if (sources != 1) {
    throw ConfigError(where, "exactly one of preset, matrix or file is required");
  }
  if (block.contains("matrix")) {
    return matrix_at(block.at("matrix"), join(where, "matrix"));
  }
  if (block.contains("file")) {
    const std::string fw = join(where, "file");
    std::filesystem::path p = string_at(block.at("file"), fw);
    if (p.is_relative()) {
      p = base_dir / p;
    }
    const json doc = read_file_json(p, fw);
    const json& m = doc.is_object() && doc.contains("matrix") ? doc.at("matrix") : doc;
    return matrix_at(m, fw);
  }
  const std::string pw = join(where, "preset");
  const std::string name = string_at(block.at("preset"), pw);
  if (name == "pauli-x") {
    return pauli::x().matrix();
  }
  if (name == "pauli-y") {
    return pauli::y().matrix();
  }
  if (name == "pauli-z") {
    return pauli::z().matrix();
  }
  if (name == "identity") {
    return pauli::identity().matrix();
  }
  if (name == "tilted") {
    return (pauli::x().matrix() + pauli::z().matrix()) / std::sqrt(2.0);
  }
  if (name == "projector") {
    if (!block.contains("psi")) {
      throw ConfigError(join(where, "psi"), "projector preset needs psi");
    }
    const ComplexVector psi = vector_at(block.at("psi"), join(where, "psi"));
    if (!(psi.norm() > 0.0)) {
      throw ConfigError(join(where, "psi"), "psi must be nonzero");
    }
    const ComplexVector u = psi / psi.norm();
    const double gap = number_or(block, "gap", where, 2.0);
    if (!(gap > 0.0)) {
      throw ConfigError(join(where, "gap"), "gap must be positive");
    }
    return protection_hamiltonian(Ket(u), gap).matrix();
  }
  throw ConfigError(pw, "unknown preset '" + name +
                            "' (pauli-x, pauli-y, pauli-z, identity, tilted, projector)");
}

Operator parse_operator(const json& block, const std::string& where,
                        const std::filesystem::path& base_dir,
                        std::set<std::string> extra_keys = {}) {
  std::set<std::string> allowed{"preset", "matrix", "file", "psi", "gap", "scale"};
  allowed.merge(extra_keys);
  check_keys(block, where, allowed);
  if (!block.contains("preset") || string_at(block.at("preset"), join(where, "preset")) != "projector") {
    for (const char* k : {"psi", "gap"}) {
      if (block.contains(k)) {
        throw ConfigError(join(where, k), "only valid with the projector preset");
      }
    }
  }
  const double scale = number_or(block, "scale", where, 1.0);
  const ComplexMatrix m = operator_matrix(block, where, base_dir) * scale;
  return {hermitian_at(m, where), matrix_json(m)};
}

// Gap between level n and its nearest neighbour.
double level_gap(const HermitianOperator& h, Index n) {
  const RealVector e = eigh(h).values;
  double gap = std::numeric_limits<double>::infinity();
  for (Index m = 0; m < e.size(); ++m) {
    if (m != n) {
      gap = std::min(gap, std::abs(e(n) - e(m)));
    }
  }
  return gap;
}

std::vector<double> parse_schedule(const json& block, double natural_gap) {
  const std::string where = "/schedule";
  check_keys(block, where, {"T", "dyadic"});
  if (block.contains("T") == block.contains("dyadic")) {
    throw ConfigError(where, "exactly one of T or dyadic is required");
  }
  std::vector<double> out;
  if (block.contains("T")) {
    const json& list = block.at("T");
    const std::string lw = join(where, "T");
    if (list.is_number()) {
      out.push_back(number_at(list, lw));
    } else if (list.is_array()) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        out.push_back(number_at(list[i], join(lw, i)));
      }
    } else {
      throw ConfigError(lw, "expected a number or a list of numbers");
    }
  } else {
    const json& d = block.at("dyadic");
    const std::string dw = join(where, "dyadic");
    check_keys(d, dw, {"base", "first", "last"});
    double base = 0.0;
    if (!d.contains("base") ||
        (d.at("base").is_string() && d.at("base").get<std::string>() == "resonance-free")) {
      if (!std::isfinite(natural_gap) || !(natural_gap > 0.0)) {
        throw ConfigError(join(dw, "base"), "resonance-free base needs a nondegenerate level");
      }
      base = resonance_free_base(natural_gap);
    } else {
      base = number_at(d.at("base"), join(dw, "base"));
    }
    const auto first = d.contains("first") ? integer_at(d.at("first"), join(dw, "first")) : 3;
    const auto last = d.contains("last") ? integer_at(d.at("last"), join(dw, "last")) : 10;
    if (last < first || last - first > 64) {
      throw ConfigError(dw, "need first <= last with at most 65 points");
    }
    out = dyadic_schedule(base, static_cast<int>(first), static_cast<int>(last));
  }
  if (out.empty()) {
    throw ConfigError(where, "schedule is empty");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) {
      throw ConfigError(join(join(where, "T"), i), "T must be positive");
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RunBlock parse_run(const json& block) {
  const std::string where = "/run";
  check_keys(block, where,
             {"trials", "base_seed", "second_order_phase", "strict_boundary", "emit_trials",
              "epsilon_back"});
  RunBlock r;
  if (block.contains("trials")) {
    r.trials = unsigned_at(block.at("trials"), join(where, "trials"));
    if (r.trials == 0) {
      throw ConfigError(join(where, "trials"), "must be at least 1");
    }
  }
  if (block.contains("base_seed")) {
    r.base_seed = unsigned_at(block.at("base_seed"), join(where, "base_seed"));
  }
  r.second_order_phase = bool_or(block, "second_order_phase", where, false);
  r.strict_boundary = bool_or(block, "strict_boundary", where, false);
  r.emit_trials = bool_or(block, "emit_trials", where, false);
  r.epsilon_back = number_or(block, "epsilon_back", where, tol::epsilon_back);
  if (!(r.epsilon_back > 0.0 && r.epsilon_back < 1.0)) {
    throw ConfigError(join(where, "epsilon_back"), "must lie in (0, 1)");
  }
  return r;
}

ApparatusSpec parse_apparatus(const json& block) {
  const std::string where = "/apparatus";
  check_keys(block, where, {"d_A", "p_max", "sigma", "x0", "mass_inv"});
  ApparatusSpec a;
  if (block.contains("d_A")) {
    a.dim = static_cast<Index>(integer_at(block.at("d_A"), join(where, "d_A")));
  }
  a.p_max = number_or(block, "p_max", where, a.p_max);
  a.sigma = number_or(block, "sigma", where, a.sigma);
  a.x0 = number_or(block, "x0", where, a.x0);
  a.mass_inv = number_or(block, "mass_inv", where, a.mass_inv);
  try {
    validate(a);
  } catch (const ConfigurationError& e) {
    throw ConfigError(where, e.what());
  }
  return a;
}

TomographyBlock parse_tomography(const json& block) {
  const std::string where = "/tomography";
  check_keys(block, where, {"state", "psi", "gap", "mode"});
  if (block.contains("state") == block.contains("psi")) {
    throw ConfigError(where, "exactly one of state or psi is required");
  }
  ComplexVector psi(2);
  if (block.contains("state")) {
    const std::string sw = join(where, "state");
    const std::string name = string_at(block.at("state"), sw);
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "zero") {
      psi << 1.0, 0.0;
    } else if (name == "one") {
      psi << 0.0, 1.0;
    } else if (name == "plus") {
      psi << r, r;
    } else if (name == "minus") {
      psi << r, -r;
    } else if (name == "plus-i") {
      psi << r, Complex(0.0, r);
    } else if (name == "minus-i") {
      psi << r, Complex(0.0, -r);
    } else {
      throw ConfigError(sw, "unknown state '" + name + "' (zero, one, plus, minus, plus-i, minus-i)");
    }
  } else {
    psi = vector_at(block.at("psi"), join(where, "psi"));
    if (psi.size() != 2) {
      throw ConfigError(join(where, "psi"), "tomography targets a qubit (2 amplitudes)");
    }
    if (!(psi.norm() > 0.0)) {
      throw ConfigError(join(where, "psi"), "psi must be nonzero");
    }
    psi /= psi.norm();
  }
  const double gap = number_or(block, "gap", where, 2.0);
  if (!(gap > 0.0)) {
    throw ConfigError(join(where, "gap"), "degenerate protection: gap must be positive");
  }
  TomographyMode mode = TomographyMode::IdealMean;
  if (block.contains("mode")) {
    const std::string mw = join(where, "mode");
    const std::string m = string_at(block.at("mode"), mw);
    if (m == "sampled") {
      mode = TomographyMode::Sampled;
    } else if (m != "ideal-mean") {
      throw ConfigError(mw, "expected ideal-mean or sampled");
    }
  }
  return TomographyBlock{.psi = Ket(psi), .gap = gap, .mode = mode};
}

}  // namespace

ProtectiveSetup ExperimentConfig::setup(double T) const {
  if (!hamiltonian || !observable) {
    throw ConfigError("/", "this command needs system and observable blocks");
  }
  return ProtectiveSetup{
      .system = {.hamiltonian = *hamiltonian, .n_index = n_index, .observable = *observable},
      .apparatus = apparatus,
      .T = T,
  };
}

EvolutionOptions ExperimentConfig::evolution() const {
  EvolutionOptions o;
  o.second_order_phase = run.second_order_phase;
  o.boundary = run.strict_boundary ? BoundaryPolicy::Strict : BoundaryPolicy::Warn;
  return o;
}

ReadoutOptions ExperimentConfig::readout() const { return ReadoutOptions{run.epsilon_back}; }

void ExperimentConfig::override_seed(std::uint64_t seed) {
  run.base_seed = seed;
  canonical["run"]["base_seed"] = seed;
}

std::string ExperimentConfig::hash() const { return hex64(fnv1a64(canonical.dump())); }

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  const json doc = parse_json(text, "");
  check_keys(doc, "", {"system", "observable", "apparatus", "schedule", "run", "tomography"});
  if (doc.contains("system") != doc.contains("observable")) {
    throw ConfigError(doc.contains("system") ? "/observable" : "/system",
                      "system and observable blocks go together");
  }
  if (!doc.contains("system") && !doc.contains("tomography")) {
    throw ConfigError("/system", "missing (required unless a tomography block is given)");
  }
  if (!doc.contains("schedule")) {
    throw ConfigError("/schedule", "missing");
  }

  std::optional<Operator> system;
  std::optional<Operator> observable;
  Index n_index = 0;
  double natural_gap = std::numeric_limits<double>::quiet_NaN();
  if (doc.contains("system")) {
    system = parse_operator(doc.at("system"), "/system", base_dir, {"n_index"});
    observable = parse_operator(doc.at("observable"), "/observable", base_dir);
    if (observable->op.dim() != system->op.dim()) {
      throw ConfigError("/observable", "dimension " + std::to_string(observable->op.dim()) +
                                           " differs from the system dimension " +
                                           std::to_string(system->op.dim()));
    }
    if (doc.at("system").contains("n_index")) {
      n_index = static_cast<Index>(integer_at(doc.at("system").at("n_index"), "/system/n_index"));
    }
    if (n_index < 0 || n_index >= system->op.dim()) {
      throw ConfigError("/system/n_index", "out of range for dimension " +
                                               std::to_string(system->op.dim()));
    }
    natural_gap = level_gap(system->op, n_index);
  }

  std::optional<TomographyBlock> tomo;
  if (doc.contains("tomography")) {
    tomo = parse_tomography(doc.at("tomography"));
    if (!system) {
      natural_gap = tomo->gap;
    }
  }

  ExperimentConfig cfg{
      .hamiltonian = system ? std::optional<HermitianOperator>(system->op) : std::nullopt,
      .n_index = n_index,
      .observable = observable ? std::optional<HermitianOperator>(observable->op) : std::nullopt,
      .apparatus = parse_apparatus(doc.value("apparatus", json::object())),
      .schedule = parse_schedule(doc.at("schedule"), natural_gap),
      .run = parse_run(doc.value("run", json::object())),
      .tomography = std::move(tomo),
      .canonical = json::object(),
  };

  json& c = cfg.canonical;
  if (system) {
    c["system"] = {{"matrix", system->canonical}, {"n_index", n_index}};
    c["observable"] = {{"matrix", observable->canonical}};
  }
  c["apparatus"] = {{"d_A", cfg.apparatus.dim},
                    {"p_max", cfg.apparatus.p_max},
                    {"sigma", cfg.apparatus.sigma},
                    {"x0", cfg.apparatus.x0},
                    {"mass_inv", cfg.apparatus.mass_inv}};
  c["schedule"] = {{"T", cfg.schedule}};
  c["run"] = {{"trials", cfg.run.trials},
              {"base_seed", cfg.run.base_seed},
              {"second_order_phase", cfg.run.second_order_phase},
              {"strict_boundary", cfg.run.strict_boundary},
              {"emit_trials", cfg.run.emit_trials},
              {"epsilon_back", cfg.run.epsilon_back}};
  if (cfg.tomography) {
    c["tomography"] = {
        {"psi", vector_json(cfg.tomography->psi.amplitudes())},
        {"gap", cfg.tomography->gap},
        {"mode", cfg.tomography->mode == TomographyMode::Sampled ? "sampled" : "ideal-mean"}};
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path.string(), "cannot open configuration file");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.where(), e.message());
  }
}

}  // namespace protmeas::cli
