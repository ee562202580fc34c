#pragma once

// Protective measurement of a system observable O by a weakly coupled pointer:
//
//   H = H_S (x) 1 + 1 (x) H_A + (1/T) O (x) P,   evolved for duration T.
//
// The coupling is written with the system factor first, consistent with the
// ordering used everywhere else in the library.

#include <cstddef>
#include <vector>

#include "protmeas/apparatus.hpp"
#include "protmeas/linalg.hpp"
#include "protmeas/tolerances.hpp"

namespace protmeas {

struct SystemSpec {
  HermitianOperator hamiltonian;  // H_S
  Index n_index = 0;              // protected level, in ascending eigenvalue order
  HermitianOperator observable;   // O
  double gap_min = tol::gap_min;
};

struct ProtectiveSetup {
  SystemSpec system;
  ApparatusSpec apparatus;
  double T = 1.0;

  double coupling() const noexcept { return 1.0 / T; }
};

struct EvolutionOptions {
  /// Include the second-order energy shift exp(-i a^2 s_m / T) in the
  /// first-order state.
  bool second_order_phase = false;
  BoundaryPolicy boundary = BoundaryPolicy::Warn;
  std::size_t max_joint_dim = tol::max_joint_dim;
};

struct JointState {
  Ket ket;
  Bipartition dims;
};

/// Throws ConfigurationError / DimensionError describing the first problem.
void validate(const ProtectiveSetup& setup);

HermitianOperator assemble_hamiltonian(const ProtectiveSetup& setup);

/// Eigensystem of H_S + (a / T) O for pointer momentum a.
EigenSystem conditioned_eigensystem(const ProtectiveSetup& setup, double momentum);

/// (p_max ||O||) / (T min_{m != n} |E_n - E_m|).
double validity_indicator(const ProtectiveSetup& setup);

/// Diagonalizes the assembled Hamiltonian once and evolves arbitrary initial
/// system states paired with the setup's Gaussian pointer.
class ExactEvolver {
 public:
  explicit ExactEvolver(const ProtectiveSetup& setup, const EvolutionOptions& options = {});

  /// exp(-i H T) (|chi> (x) |phi(x0)>).
  JointState evolve(const Ket& system_initial) const;
  /// Evolution of the protected eigenstate |n>.
  JointState evolve_protected() const;

  const ProtectiveSetup& setup() const noexcept { return setup_; }
  const PointerBasis& pointer() const noexcept { return pointer_; }
  const EigenSystem& system_eigen() const noexcept { return system_eigen_; }
  const Ket& initial_pointer() const noexcept { return initial_pointer_; }
  const HermitianOperator& hamiltonian() const noexcept { return hamiltonian_; }
  Ket protected_state() const { return system_eigen_.vector(setup_.system.n_index); }

 private:
  ProtectiveSetup setup_;
  PointerBasis pointer_;
  EigenSystem system_eigen_;
  Ket initial_pointer_;
  HermitianOperator hamiltonian_;
  BoundaryPolicy boundary_;
  // Column s holds exp(-i H T) (|s> (x) |phi(x0)>) for computational basis state s.
  ComplexMatrix responses_;
};

JointState evolve_exact(const ProtectiveSetup& setup, const EvolutionOptions& options = {});

struct PerturbativeState {
  JointState state;  // renormalized
  /// ||psi|| - 1 before renormalization; O(1/T^2).
  double norm_deficit = 0.0;
  /// Squared norm of the first-order term attached to each system level m
  /// (zero at m = n).
  std::vector<double> branch_weights;
  double validity_indicator = 0.0;
};

/// Zeroth- plus first-order final state in 1/T:
///
///   e^{-iE_n T}|n> e^{-iH_A T}|phi(x0 + <O>_n)>
///   + (1/T) e^{-iH_A T} sum_{m != n} <m|O|n>/(E_n - E_m) |m>
///       [e^{-iE_n T}|phi~(x0 + <O>_n)> - e^{-iE_m T}|phi~(x0 + <O>_m)>]
///
/// where phi~ weights each momentum component of the pointer by its momentum.
/// Translations are applied as exact phases in the momentum basis.
PerturbativeState evolve_perturbative(const ProtectiveSetup& setup,
                                      const EvolutionOptions& options = {});

struct EvolutionReport {
  JointState psi_exact;
  JointState psi_pert;
  double T = 0.0;
  double pointer_shift = 0.0;       // <X>_final - <X> of the freely evolved pointer
  double expectation_target = 0.0;  // <O>_n
  double disturbance_prob = 0.0;    // 1 - <n|rho_S|n>
  double entropy_bits = 0.0;        // S(rho_S)
  double pert_error = 0.0;          // ||psi_exact - e^{i theta} psi_pert||, theta optimal
  double validity_indicator = 0.0;
  double norm_deficit = 0.0;
  /// <m|rho_S|m> of the exact state for each H_S level.
  std::vector<double> exact_populations;
  /// First-order branch weights of the perturbative state.
  std::vector<double> pert_branch_weights;
};

EvolutionReport analyze(const ProtectiveSetup& setup, const EvolutionOptions& options = {});

/// Report for a state already evolved by `evolver`.
EvolutionReport analyze(const ExactEvolver& evolver, const EvolutionOptions& options = {});

/// Population of the H_S levels other than n: sum_{m != n} <m|rho_S|m>.
double disturbance_probability(const DensityMatrix& rho_system, const EigenSystem& system_eigen,
                               Index n_index);

/// -gap |psi><psi|, whose unique ground state is psi (n_index 0).
HermitianOperator protection_hamiltonian(const Ket& psi, double gap);

/// Dyadic schedule base 2 pi / (3 gap). On T_k = 2^k T0 the phase gap * T_k
/// stays in {2 pi/3, 4 pi/3} mod 2 pi, so |1 - e^{-i gap T}|^2 = 3 on every
/// sweep point and the first-order transition amplitude has no nodes.
double resonance_free_base(double gap);

/// {base * 2^k : k = first..last}.
std::vector<double> dyadic_schedule(double base, int first_exponent, int last_exponent);

}  // namespace protmeas
