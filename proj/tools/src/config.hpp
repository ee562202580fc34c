#pragma once

// Experiment configuration: one JSON document with the blocks
// system, observable, apparatus, schedule, run and (optionally) tomography.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "protmeas/apparatus.hpp"
#include "protmeas/errors.hpp"
#include "protmeas/linalg.hpp"
#include "protmeas/protective.hpp"
#include "protmeas/readout.hpp"
#include "protmeas/tomography.hpp"

namespace protmeas::cli {

/// Parse or validation failure. `where` is a JSON pointer ("/apparatus/sigma")
/// or "line L, column C" for syntax errors.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& message)
      : Error(where + ": " + message), where_(where), message_(message) {}
  const std::string& where() const noexcept { return where_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string where_;
  std::string message_;
};

struct RunBlock {
  std::uint64_t trials = 10000;
  std::uint64_t base_seed = 1;
  bool second_order_phase = false;
  bool strict_boundary = false;
  bool emit_trials = false;
  double epsilon_back = tol::epsilon_back;
};

struct TomographyBlock {
  Ket psi;
  double gap = 2.0;
  TomographyMode mode = TomographyMode::IdealMean;
};

struct ExperimentConfig {
  // Absent in tomography-only documents.
  std::optional<HermitianOperator> hamiltonian;
  Index n_index = 0;
  std::optional<HermitianOperator> observable;
  ApparatusSpec apparatus;
  std::vector<double> schedule;  // ascending T values
  RunBlock run;
  std::optional<TomographyBlock> tomography;
  /// Fully resolved document (presets expanded, defaults filled) with sorted
  /// keys; the hash is taken over its compact dump.
  nlohmann::json canonical;

  /// Throws ConfigError when the system or observable block is missing.
  ProtectiveSetup setup(double T) const;
  EvolutionOptions evolution() const;
  ReadoutOptions readout() const;
  void override_seed(std::uint64_t seed);
  /// 16 hex digits of FNV-1a 64 over canonical.dump().
  std::string hash() const;
};

/// `base_dir` resolves relative "file" references.
ExperimentConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a64(const std::string& bytes) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace protmeas::cli
