#pragma once

// Projective pointer-position readout with collapse, single trials and
// seeded Monte Carlo ensembles.

#include <cstdint>
#include <vector>

#include "protmeas/protective.hpp"
#include "protmeas/tolerances.hpp"

namespace protmeas {

struct ReadoutOptions {
  double epsilon_back = tol::epsilon_back;
};

struct PositionSample {
  Index grid_index = 0;
  double x = 0.0;
  double probability = 0.0;  // p(x_j)
  Ket system;                // conditional system state after the readout
  JointState collapsed;      // system (x) |x_j>
};

/// Draws x_j with probability sum_s |<s, x_j|psi>|^2 and collapses onto it.
/// Uses the first uniform of CounterStream(seed).
PositionSample sample_position(const JointState& psi, const PointerBasis& basis,
                               std::uint64_t seed);

struct ReadoutOutcome {
  double x_sampled = 0.0;
  double o_estimate = 0.0;  // x_sampled - x0
  Index grid_index = 0;
  DensityMatrix post_system;
  double fidelity = 0.0;        // <n|post_system|n>
  bool projected_back = false;  // fidelity >= 1 - epsilon_back
  /// Outcome of a projective test {|n><n|, 1 - |n><n|} on the post-readout
  /// system, drawn with the second uniform of the trial stream. Its frequency
  /// estimates 1 - <n|rho_S|n> without bias.
  bool found_in_initial = false;
  std::uint64_t seed = 0;
};

/// Readout of a state produced by `evolver`.
ReadoutOutcome read_out(const ExactEvolver& evolver, const JointState& psi, std::uint64_t seed,
                        const ReadoutOptions& options = {});

ReadoutOutcome run_trial(const ProtectiveSetup& setup, std::uint64_t seed,
                         const ReadoutOptions& options = {},
                         const EvolutionOptions& evolution = {});

struct Histogram {
  std::vector<double> edges;  // size counts + 1
  std::vector<std::uint64_t> counts;
};

struct TrialStatistics {
  std::uint64_t n_trials = 0;
  double mean_estimate = 0.0;
  double std_error = 0.0;
  /// Fraction of trials whose projective test found the system outside |n>.
  double freq_disturbed = 0.0;
  /// Fraction of trials with post-readout fidelity below 1 - epsilon_back.
  double freq_low_fidelity = 0.0;
  /// 1 - <n|rho_S|n> of the pre-readout exact state.
  double exact_disturbance = 0.0;
  double expectation_target = 0.0;
  Histogram histogram;  // of x_sampled, one bin per grid point
  std::vector<ReadoutOutcome> trials;  // filled only when requested
};

/// Trial i uses seed derive_seed(base_seed, i); aggregation is in index order.
TrialStatistics monte_carlo(const ProtectiveSetup& setup, std::uint64_t n_trials,
                            std::uint64_t base_seed, const ReadoutOptions& options = {},
                            const EvolutionOptions& evolution = {}, bool keep_trials = false);

/// sqrt(p (1 - p) / n).
double binomial_std_error(double p, std::uint64_t n);

}  // namespace protmeas
