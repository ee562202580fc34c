#include "protmeas/readout.hpp"

#include <algorithm>
#include <cmath>

#include "protmeas/errors.hpp"
#include "protmeas/rng.hpp"

namespace protmeas {

namespace {

// Position-representation amplitudes: row s, column j = <s, x_j|psi>.
ComplexMatrix position_amplitudes(const JointState& psi, const PointerBasis& basis) {
  const Index ds = psi.dims.system;
  const Index da = psi.dims.apparatus;
  if (da != basis.dim()) {
    throw DimensionError("sample_position: pointer grid does not match the joint state");
  }
  ComplexMatrix out(ds, da);
  for (Index s = 0; s < ds; ++s) {
    out.row(s) = basis.to_position(psi.ket.amplitudes().segment(s * da, da)).transpose();
  }
  return out;
}

class PositionSampler {
 public:
  PositionSampler(const JointState& psi, const PointerBasis& basis)
      : basis_(basis), amplitudes_(position_amplitudes(psi, basis)) {
    const RealVector p = amplitudes_.cwiseAbs2().colwise().sum().transpose();
    cumulative_.resize(p.size());
    double acc = 0.0;
    for (Index j = 0; j < p.size(); ++j) {
      acc += p(j);
      cumulative_(j) = acc;
    }
    if (!(acc > 0.0)) {
      throw NumericalError("sample_position: pointer marginal vanishes");
    }
  }

  PositionSample draw(double u) const {
    const double total = cumulative_(cumulative_.size() - 1);
    const double target = u * total;
    // First cell whose cumulative mass exceeds the target; zero-probability
    // cells are never selected.
    Index j = 0;
    while (j + 1 < cumulative_.size() && cumulative_(j) <= target) {
      ++j;
    }
    const double pj = cumulative_(j) - (j > 0 ? cumulative_(j - 1) : 0.0);
    const ComplexVector column = amplitudes_.col(j);
    Ket system = Ket::normalized(column);
    JointState collapsed{tensor(system, Ket(basis_.position_eigenstate(j))),
                         Bipartition{amplitudes_.rows(), basis_.dim()}};
    return PositionSample{j, basis_.position(j), pj / total, std::move(system),
                          std::move(collapsed)};
  }

 private:
  const PointerBasis& basis_;
  ComplexMatrix amplitudes_;
  RealVector cumulative_;
};

ReadoutOutcome outcome_from(const PositionSampler& sampler, const Ket& protected_state, double x0,
                            std::uint64_t seed, const ReadoutOptions& options) {
  CounterStream stream(seed);
  const double u_position = stream.uniform();
  const double u_check = stream.uniform();
  PositionSample sample = sampler.draw(u_position);
  const double fidelity = std::norm(protected_state.amplitudes().dot(sample.system.amplitudes()));
  return ReadoutOutcome{
      .x_sampled = sample.x,
      .o_estimate = sample.x - x0,
      .grid_index = sample.grid_index,
      .post_system = DensityMatrix::from_pure(sample.system),
      .fidelity = fidelity,
      .projected_back = fidelity >= 1.0 - options.epsilon_back,
      .found_in_initial = u_check < fidelity,
      .seed = seed,
  };
}

}  // namespace

PositionSample sample_position(const JointState& psi, const PointerBasis& basis,
                               std::uint64_t seed) {
  CounterStream stream(seed);
  return PositionSampler(psi, basis).draw(stream.uniform());
}

ReadoutOutcome read_out(const ExactEvolver& evolver, const JointState& psi, std::uint64_t seed,
                        const ReadoutOptions& options) {
  const PositionSampler sampler(psi, evolver.pointer());
  return outcome_from(sampler, evolver.protected_state(), evolver.setup().apparatus.x0, seed,
                      options);
}

ReadoutOutcome run_trial(const ProtectiveSetup& setup, std::uint64_t seed,
                         const ReadoutOptions& options, const EvolutionOptions& evolution) {
  const ExactEvolver evolver(setup, evolution);
  return read_out(evolver, evolver.evolve_protected(), seed, options);
}

TrialStatistics monte_carlo(const ProtectiveSetup& setup, std::uint64_t n_trials,
                            std::uint64_t base_seed, const ReadoutOptions& options,
                            const EvolutionOptions& evolution, bool keep_trials) {
  if (n_trials < 1) {
    throw ConfigurationError("monte_carlo: n_trials must be >= 1");
  }
  const ExactEvolver evolver(setup, evolution);
  const PointerBasis& pointer = evolver.pointer();
  const JointState psi = evolver.evolve_protected();
  const PositionSampler sampler(psi, pointer);
  const Ket target = evolver.protected_state();
  const double x0 = setup.apparatus.x0;

  TrialStatistics stats;
  stats.n_trials = n_trials;
  stats.histogram.counts.assign(static_cast<std::size_t>(pointer.dim()), 0);
  for (Index j = 0; j < pointer.dim(); ++j) {
    stats.histogram.edges.push_back(pointer.position(j) - 0.5 * pointer.dx);
  }
  stats.histogram.edges.push_back(pointer.position(pointer.dim() - 1) + 0.5 * pointer.dx);

  // Welford running mean and sum of squared deviations.
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t disturbed = 0;
  std::uint64_t low_fidelity = 0;
  for (std::uint64_t i = 0; i < n_trials; ++i) {
    ReadoutOutcome out = outcome_from(sampler, target, x0, derive_seed(base_seed, i), options);
    const double delta = out.o_estimate - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (out.o_estimate - mean);
    disturbed += out.found_in_initial ? 0 : 1;
    low_fidelity += out.projected_back ? 0 : 1;
    ++stats.histogram.counts[static_cast<std::size_t>(out.grid_index)];
    if (keep_trials) {
      stats.trials.push_back(std::move(out));
    }
  }
  const double n = static_cast<double>(n_trials);
  stats.mean_estimate = mean;
  if (n_trials > 1) {
    stats.std_error = std::sqrt(m2 / (n - 1.0) / n);
  }
  stats.freq_disturbed = static_cast<double>(disturbed) / n;
  stats.freq_low_fidelity = static_cast<double>(low_fidelity) / n;
  const DensityMatrix rho_s = reduced_state(psi.ket, psi.dims, Subsystem::System);
  stats.exact_disturbance =
      disturbance_probability(rho_s, evolver.system_eigen(), setup.system.n_index);
  stats.expectation_target = expectation(setup.system.observable, target);
  return stats;
}

double binomial_std_error(double p, std::uint64_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

}  // namespace protmeas
