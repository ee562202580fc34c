#include "protmeas/protective.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "protmeas/errors.hpp"

namespace protmeas {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void validate_shape(const ProtectiveSetup& setup) {
  if (!(setup.T > 0.0) || !std::isfinite(setup.T)) {
    std::ostringstream os;
    os << "setup: T = " << setup.T << " must be positive and finite";
    throw ConfigurationError(os.str());
  }
  const SystemSpec& sys = setup.system;
  if (sys.hamiltonian.dim() != sys.observable.dim()) {
    throw DimensionError("setup: H_S is " + std::to_string(sys.hamiltonian.dim()) +
                         "-dimensional but O is " + std::to_string(sys.observable.dim()) +
                         "-dimensional");
  }
  validate(setup.apparatus);
}

double min_level_gap(const RealVector& levels, Index n) {
  double gap = std::numeric_limits<double>::infinity();
  for (Index m = 0; m < levels.size(); ++m) {
    if (m != n) {
      gap = std::min(gap, std::abs(levels(n) - levels(m)));
    }
  }
  return gap;
}

// Runs before anything of size d_A is allocated.
const ProtectiveSetup& validated_within_cap(const ProtectiveSetup& setup,
                                            const EvolutionOptions& options) {
  validate(setup);
  const auto joint = static_cast<std::size_t>(setup.system.hamiltonian.dim() * setup.apparatus.dim);
  if (joint > options.max_joint_dim) {
    throw ResourceError("evolve_exact: joint dimension " + std::to_string(joint) +
                        " exceeds the cap " + std::to_string(options.max_joint_dim));
  }
  return setup;
}

// Boundary mass of the pointer marginal of a joint state.
double joint_boundary_mass(const PointerBasis& pointer, const ComplexVector& joint, Index ds) {
  const Index da = pointer.dim();
  double mass = 0.0;
  for (Index s = 0; s < ds; ++s) {
    mass += pointer.boundary_mass(joint.segment(s * da, da));
  }
  return mass;
}

void check_boundary(const PointerBasis& pointer, const ComplexVector& joint, Index ds,
                    BoundaryPolicy policy, const char* where) {
  const double mass = joint_boundary_mass(pointer, joint, ds);
  if (mass <= tol::boundary_mass) {
    return;
  }
  std::ostringstream os;
  os << where << ": pointer mass " << mass << " within two grid points of the window edge";
  if (policy == BoundaryPolicy::Strict) {
    throw BoundaryError(os.str());
  }
  std::cerr << "warning: " << os.str() << " (wraparound)\n";
}

double pointer_mean(const PointerBasis& pointer, const ComplexVector& joint, Index ds) {
  const Index da = pointer.dim();
  RealVector probs = RealVector::Zero(da);
  for (Index s = 0; s < ds; ++s) {
    probs += pointer.position_probabilities(joint.segment(s * da, da));
  }
  return probs.dot(pointer.position);
}

}  // namespace

void validate(const ProtectiveSetup& setup) {
  validate_shape(setup);
  const SystemSpec& sys = setup.system;
  const Index ds = sys.hamiltonian.dim();
  if (sys.n_index < 0 || sys.n_index >= ds) {
    throw ConfigurationError("setup: n_index " + std::to_string(sys.n_index) +
                             " outside [0, " + std::to_string(ds) + ")");
  }
  const EigenSystem eig = eigh(sys.hamiltonian);
  const double gap = min_level_gap(eig.values, sys.n_index);
  if (gap < sys.gap_min) {
    std::ostringstream os;
    os << "setup: protected level " << sys.n_index << " is degenerate (gap " << gap
       << " < gap_min " << sys.gap_min << ")";
    throw ConfigurationError(os.str());
  }
  const double range = sys.observable.spectral_range();
  const double dx = std::numbers::pi / setup.apparatus.p_max;
  if (range > 0.0 && dx > range * tol::resolution_fraction) {
    std::ostringstream os;
    os << "setup: grid spacing dx = " << dx << " cannot resolve shifts of O (spectral range "
       << range << "; need dx <= " << range * tol::resolution_fraction
       << ", raise p_max)";
    throw ConfigurationError(os.str());
  }
}

HermitianOperator assemble_hamiltonian(const ProtectiveSetup& setup) {
  validate_shape(setup);
  const SystemSpec& sys = setup.system;
  const PointerBasis pointer = build_pointer(setup.apparatus);
  const Index ds = sys.hamiltonian.dim();
  const Index da = pointer.dim();
  ComplexMatrix h = tensor(sys.hamiltonian.matrix(), ComplexMatrix::Identity(da, da));
  h += tensor(ComplexMatrix::Identity(ds, ds), pointer.hamiltonian.matrix());
  h += setup.coupling() * tensor(sys.observable.matrix(), pointer.momentum_op.matrix());
  return HermitianOperator(std::move(h));
}

EigenSystem conditioned_eigensystem(const ProtectiveSetup& setup, double momentum) {
  validate_shape(setup);
  return eigh(setup.system.hamiltonian + setup.system.observable * (momentum / setup.T));
}

double validity_indicator(const ProtectiveSetup& setup) {
  const EigenSystem eig = eigh(setup.system.hamiltonian);
  const double gap = min_level_gap(eig.values, setup.system.n_index);
  if (!std::isfinite(gap)) {
    return 0.0;
  }
  return setup.apparatus.p_max * setup.system.observable.spectral_norm() / (setup.T * gap);
}

// ------------------------------------------------------------ ExactEvolver

ExactEvolver::ExactEvolver(const ProtectiveSetup& setup, const EvolutionOptions& options)
    : setup_(validated_within_cap(setup, options)),
      pointer_(build_pointer(setup.apparatus)),
      system_eigen_(eigh(setup.system.hamiltonian)),
      initial_pointer_(gaussian_pointer(pointer_, setup.apparatus.x0, setup.apparatus.sigma)),
      hamiltonian_(assemble_hamiltonian(setup_)),
      boundary_(options.boundary) {
  const Index ds = setup_.system.hamiltonian.dim();
  const Index da = pointer_.dim();
  const EigenSystem eig = eigh(hamiltonian_);

  ComplexMatrix initial = ComplexMatrix::Zero(ds * da, ds);
  for (Index s = 0; s < ds; ++s) {
    initial.block(s * da, s, da, 1) = initial_pointer_.amplitudes();
  }
  ComplexVector phases(eig.dim());
  for (Index k = 0; k < eig.dim(); ++k) {
    phases(k) = std::polar(1.0, -eig.values(k) * setup_.T);
  }
  responses_ = eig.vectors * (phases.asDiagonal() * (eig.vectors.adjoint() * initial));
}

JointState ExactEvolver::evolve(const Ket& system_initial) const {
  const Index ds = setup_.system.hamiltonian.dim();
  if (system_initial.dim() != ds) {
    throw DimensionError("evolve: initial system state has the wrong dimension");
  }
  ComplexVector out = responses_ * system_initial.amplitudes();
  check_boundary(pointer_, out, ds, boundary_, "evolve_exact");
  return JointState{Ket(std::move(out)), Bipartition{ds, pointer_.dim()}};
}

JointState ExactEvolver::evolve_protected() const { return evolve(protected_state()); }

JointState evolve_exact(const ProtectiveSetup& setup, const EvolutionOptions& options) {
  return ExactEvolver(setup, options).evolve_protected();
}

// ------------------------------------------------------ first-order state

PerturbativeState evolve_perturbative(const ProtectiveSetup& setup,
                                      const EvolutionOptions& options) {
  validate(setup);
  const SystemSpec& sys = setup.system;
  const PointerBasis pointer = build_pointer(setup.apparatus);
  const Ket phi = gaussian_pointer(pointer, setup.apparatus.x0, setup.apparatus.sigma);
  const EigenSystem eig = eigh(sys.hamiltonian);
  const Index ds = eig.dim();
  const Index da = pointer.dim();
  const Index n = sys.n_index;
  const double T = setup.T;

  // Observable in the H_S eigenbasis.
  const ComplexMatrix o = eig.vectors.adjoint() * sys.observable.matrix() * eig.vectors;
  const RealVector levels = eig.values;

  // Second-order level shift coefficient: E^(2)(m, a) = (a/T)^2 s_m. Pairs
  // closer than gap_min are skipped; only m = n is guaranteed nondegenerate.
  RealVector shift2 = RealVector::Zero(ds);
  if (options.second_order_phase) {
    for (Index m = 0; m < ds; ++m) {
      for (Index k = 0; k < ds; ++k) {
        const double de = levels(m) - levels(k);
        if (k != m && std::abs(de) >= sys.gap_min) {
          shift2(m) += std::norm(o(k, m)) / de;
        }
      }
    }
  }

  // branch(m, i): pointer amplitude at momentum a_i attached to level m,
  // without the free factor exp(-i E_i^A T) and the 1/T prefactor.
  auto branch_phase = [&](Index m, double a) {
    return std::polar(1.0, -levels(m) * T - a * o(m, m).real() - a * a * shift2(m) / T);
  };

  RowMajorMatrix coeffs = RowMajorMatrix::Zero(ds, da);
  std::vector<double> weights(static_cast<std::size_t>(ds), 0.0);
  for (Index i = 0; i < da; ++i) {
    const double a = pointer.momentum(i);
    const Complex free = std::polar(1.0, -pointer.mass_inv * a * a * T);
    const Complex amp = free * phi[i];
    const Complex zeroth = branch_phase(n, a);
    coeffs(n, i) = zeroth * amp;
    for (Index m = 0; m < ds; ++m) {
      if (m == n) {
        continue;
      }
      const Complex c = o(m, n) / (levels(n) - levels(m)) / T;
      coeffs(m, i) = c * a * amp * (zeroth - branch_phase(m, a));
    }
  }
  for (Index m = 0; m < ds; ++m) {
    if (m != n) {
      weights[static_cast<std::size_t>(m)] = coeffs.row(m).squaredNorm();
    }
  }

  // Back to the computational system basis; joint index s * d_A + i.
  const RowMajorMatrix joint = eig.vectors * coeffs;
  ComplexVector flat = Eigen::Map<const ComplexVector>(joint.data(), ds * da);
  check_boundary(pointer, flat, ds, options.boundary, "evolve_perturbative");
  const double norm = flat.norm();

  return PerturbativeState{
      .state = JointState{Ket::normalized(std::move(flat)), Bipartition{ds, da}},
      .norm_deficit = norm - 1.0,
      .branch_weights = std::move(weights),
      .validity_indicator = validity_indicator(setup),
  };
}

// ---------------------------------------------------------------- analyze

double disturbance_probability(const DensityMatrix& rho_system, const EigenSystem& system_eigen,
                               Index n_index) {
  if (rho_system.dim() != system_eigen.dim()) {
    throw DimensionError("disturbance_probability: dimension mismatch");
  }
  double p = 0.0;
  for (Index m = 0; m < system_eigen.dim(); ++m) {
    if (m != n_index) {
      const auto v = system_eigen.vectors.col(m);
      p += v.dot(rho_system.matrix() * v).real();
    }
  }
  return std::clamp(p, 0.0, 1.0);
}

EvolutionReport analyze(const ExactEvolver& evolver, const EvolutionOptions& options) {
  const ProtectiveSetup& setup = evolver.setup();
  const PointerBasis& pointer = evolver.pointer();
  const EigenSystem& eig = evolver.system_eigen();
  const Index ds = eig.dim();
  const Index n = setup.system.n_index;

  JointState exact = evolver.evolve_protected();
  PerturbativeState pert = evolve_perturbative(setup, options);

  const DensityMatrix rho_s = reduced_state(exact.ket, exact.dims, Subsystem::System);
  std::vector<double> populations(static_cast<std::size_t>(ds));
  for (Index m = 0; m < ds; ++m) {
    const auto v = eig.vectors.col(m);
    populations[static_cast<std::size_t>(m)] = v.dot(rho_s.matrix() * v).real();
  }

  const double free_mean =
      mean_position(pointer, free_evolve(pointer, evolver.initial_pointer(), setup.T));
  const double final_mean = pointer_mean(pointer, exact.ket.amplitudes(), ds);

  const ComplexVector& psi_e = exact.ket.amplitudes();
  const ComplexVector& psi_p = pert.state.ket.amplitudes();
  const Complex overlap = psi_p.dot(psi_e);
  const Complex align = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  const double pert_error = (psi_e - align * psi_p).norm();

  EvolutionReport report{
      .psi_exact = std::move(exact),
      .psi_pert = pert.state,
      .T = setup.T,
      .pointer_shift = final_mean - free_mean,
      .expectation_target = expectation(setup.system.observable, evolver.protected_state()),
      .disturbance_prob = disturbance_probability(rho_s, eig, n),
      .entropy_bits = entanglement_entropy(rho_s),
      .pert_error = pert_error,
      .validity_indicator = pert.validity_indicator,
      .norm_deficit = pert.norm_deficit,
      .exact_populations = std::move(populations),
      .pert_branch_weights = std::move(pert.branch_weights),
  };
  return report;
}

EvolutionReport analyze(const ProtectiveSetup& setup, const EvolutionOptions& options) {
  return analyze(ExactEvolver(setup, options), options);
}

// --------------------------------------------------------------- helpers

HermitianOperator protection_hamiltonian(const Ket& psi, double gap) {
  if (!(gap > 0.0) || !std::isfinite(gap)) {
    std::ostringstream os;
    os << "protection_hamiltonian: gap " << gap << " must be positive";
    throw ConfigurationError(os.str());
  }
  return HermitianOperator(-gap * psi.amplitudes() * psi.amplitudes().adjoint());
}

double resonance_free_base(double gap) {
  if (!(gap > 0.0)) {
    throw ConfigurationError("resonance_free_base: gap must be positive");
  }
  return 2.0 * std::numbers::pi / (3.0 * gap);
}

std::vector<double> dyadic_schedule(double base, int first_exponent, int last_exponent) {
  if (!(base > 0.0) || last_exponent < first_exponent) {
    throw ConfigurationError("dyadic_schedule: need base > 0 and first <= last");
  }
  std::vector<double> out;
  for (int k = first_exponent; k <= last_exponent; ++k) {
    out.push_back(std::ldexp(base, k));
  }
  return out;
}

}  // namespace protmeas
