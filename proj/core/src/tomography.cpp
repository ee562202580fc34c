#include "protmeas/tomography.hpp"

#include <cmath>
#include <sstream>

#include "protmeas/errors.hpp"
#include "protmeas/readout.hpp"
#include "protmeas/rng.hpp"

namespace protmeas {

double BlochVector::norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }

BlochVector project_to_ball(const BlochVector& n) {
  const double r = n.norm();
  // Slack so that an already projected vector is a fixed point.
  if (r <= 1.0 + 1e-12) {
    return n;
  }
  return {n.x / r, n.y / r, n.z / r};
}

DensityMatrix reconstruct_density(const BlochVector& n) {
  const BlochVector b = project_to_ball(n);
  ComplexMatrix rho(2, 2);
  rho << 0.5 * (1.0 + b.z), 0.5 * Complex(b.x, -b.y), 0.5 * Complex(b.x, b.y), 0.5 * (1.0 - b.z);
  return DensityMatrix(std::move(rho));
}

BlochVector bloch_of(const DensityMatrix& rho) {
  if (rho.dim() != 2) {
    throw DimensionError("bloch_of: expected a qubit state");
  }
  const ComplexMatrix& m = rho.matrix();
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

BlochVector bloch_of(const Ket& psi) { return bloch_of(DensityMatrix::from_pure(psi)); }

namespace {

constexpr char kAxisNames[3] = {'x', 'y', 'z'};

HermitianOperator axis_operator(int axis) {
  switch (axis) {
    case 0:
      return pauli::x();
    case 1:
      return pauli::y();
    default:
      return pauli::z();
  }
}

// Collapse of chi under {|psi><psi|, 1 - |psi><psi|}.
Ket survival_collapse(const Ket& psi, const Ket& chi, bool survived) {
  if (survived) {
    return psi;
  }
  const Complex c = psi.amplitudes().dot(chi.amplitudes());
  return Ket::normalized(chi.amplitudes() - c * psi.amplitudes());
}

}  // namespace

TomographyEngine::TomographyEngine(const Ket& psi_true, double gap, double T,
                                   const TomographyOptions& options)
    : psi_true_(psi_true) {
  if (psi_true.dim() != 2) {
    throw DimensionError("tomography: the target must be a qubit state");
  }
  const HermitianOperator h = protection_hamiltonian(psi_true, gap);
  evolvers_.reserve(3);
  for (int axis = 0; axis < 3; ++axis) {
    ProtectiveSetup setup{
        .system = {.hamiltonian = h, .n_index = 0, .observable = axis_operator(axis)},
        .apparatus = options.apparatus,
        .T = T,
    };
    evolvers_.emplace_back(setup, options.evolution);
    const EvolutionReport r = analyze(evolvers_.back(), options.evolution);
    exact_shift_[static_cast<std::size_t>(axis)] = r.pointer_shift;
    survival_[static_cast<std::size_t>(axis)] = 1.0 - r.disturbance_prob;
  }
}

TomographyResult TomographyEngine::run(TomographyMode mode, std::uint64_t seed) const {
  std::vector<AxisRecord> records;
  BlochVector raw;
  double* slots[3] = {&raw.x, &raw.y, &raw.z};
  Ket system = psi_true_;
  bool all_survived = true;

  for (int axis = 0; axis < 3; ++axis) {
    const auto a = static_cast<std::size_t>(axis);
    const ExactEvolver& ev = evolvers_[a];
    AxisRecord rec{.axis = kAxisNames[a], .seed = derive_seed(seed, a)};
    if (mode == TomographyMode::IdealMean) {
      rec.estimate = exact_shift_[a];
      rec.survival_probability = survival_[a];
    } else {
      const JointState evolved = ev.evolve(system);
      const DensityMatrix rho_s = reduced_state(evolved.ket, evolved.dims, Subsystem::System);
      rec.survival_probability = fidelity_pure(psi_true_, rho_s);

      // sample_position takes the first uniform of this stream.
      const PositionSample sample = sample_position(evolved, ev.pointer(), rec.seed);
      CounterStream stream(rec.seed);
      stream.uniform();
      const double u_check = stream.uniform();

      rec.x_sampled = sample.x;
      rec.estimate = sample.x - ev.setup().apparatus.x0;
      const double p = std::norm(psi_true_.amplitudes().dot(sample.system.amplitudes()));
      rec.survived = u_check < p;
      all_survived = all_survived && rec.survived;
      system = survival_collapse(psi_true_, sample.system, rec.survived);
    }
    *slots[axis] = rec.estimate;
    records.push_back(rec);
  }

  const BlochVector bloch = project_to_ball(raw);
  DensityMatrix rho_hat = reconstruct_density(bloch);
  const double fidelity = fidelity_pure(psi_true_, rho_hat);
  return TomographyResult{
      .bloch = bloch,
      .raw = raw,
      .clipped = raw.norm() > 1.0,
      .rho_hat = std::move(rho_hat),
      .fidelity_true = fidelity,
      .mode = mode,
      .per_axis = std::move(records),
      .survived = all_survived,
      .final_system = system,
  };
}

TomographyResult protective_tomography(const Ket& psi_true, double gap, double T,
                                       TomographyMode mode, std::uint64_t seed,
                                       const TomographyOptions& options) {
  return TomographyEngine(psi_true, gap, T, options).run(mode, seed);
}

}  // namespace protmeas
