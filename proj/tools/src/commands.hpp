#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "protmeas/fit.hpp"
#include "records.hpp"

namespace protmeas::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kResource = 3,
  kInsufficientRange = 4,
  kRuntime = 5,
};

/// One summary record per T, sorted by T.
std::vector<ResultRecord> simulate(const ExperimentConfig& config);

/// One summary per T; per-trial records follow each summary when
/// run.emit_trials is set.
std::vector<ResultRecord> monte_carlo_records(const ExperimentConfig& config);

/// Per-axis records then one summary, for each T.
std::vector<ResultRecord> tomography_records(const ExperimentConfig& config);

struct ScalingArgs {
  int n_qubits = 1;
  double seconds_per_measurement = 1e-5;
  bool assume_pure = false;
  double c_pure = 1.0;
  double age_seconds = 4.35e17;
};

ResultRecord scaling_record(const ScalingArgs& args);

/// Raised when fewer than `min_points` records pass the validity gate.
class InsufficientRange : public Error {
 public:
  using Error::Error;
};

struct SweepFitArgs {
  std::string field = "disturbance_prob";
  double gate = tol::validity_gate;  // keep records with validity_indicator < gate
  std::size_t min_points = 4;
};

/// Log-log fit of `field` against T over the gated records.
LinearFit sweep_fit(const std::vector<ResultRecord>& records, const SweepFitArgs& args);

ResultRecord fit_record(const LinearFit& fit, const SweepFitArgs& args, const std::string& hash,
                        std::uint64_t seed);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace protmeas::cli
