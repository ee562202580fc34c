#pragma once

// Finite pointer model. The apparatus basis is the momentum eigenbasis
// {|A_i>}: P and H_A = mass_inv * P^2 are both diagonal in it, so they commute
// exactly. Positions live on the conjugate periodic grid, linked to momenta by
// a unitary DFT.

#include "protmeas/linalg.hpp"

namespace protmeas {

struct ApparatusSpec {
  Index dim = 128;        // grid size d_A (even, >= 8)
  double p_max = 16.0;    // momentum grid is [-p_max, p_max)
  double x0 = 0.0;        // initial pointer center
  double sigma = 1.0;     // Gaussian width in position
  double mass_inv = 0.0;  // H_A = mass_inv * P^2

  friend bool operator==(const ApparatusSpec&, const ApparatusSpec&) = default;
};

/// Throws ConfigurationError naming the first violated bound.
void validate(const ApparatusSpec& spec);

enum class BoundaryPolicy {
  Warn,    // report wraparound on stderr and continue
  Strict,  // throw BoundaryError
};

struct PointerBasis {
  RealVector momentum;  // a_i = -p_max + i * dp
  RealVector position;  // x_j = (j - d/2) * dx
  double dp = 0.0;
  double dx = 0.0;      // pi / p_max
  double window = 0.0;  // d * dx
  double mass_inv = 0.0;
  HermitianOperator momentum_op;
  HermitianOperator position_op;
  HermitianOperator hamiltonian;
  /// fourier(i, j) = <A_i|x_j> = exp(-i a_i x_j) / sqrt(d).
  ComplexMatrix fourier;

  Index dim() const noexcept { return momentum.size(); }

  ComplexVector to_position(const ComplexVector& momentum_amplitudes) const;
  ComplexVector to_momentum(const ComplexVector& position_amplitudes) const;
  /// |<x_j|psi>|^2 for a pointer state given in the momentum basis.
  RealVector position_probabilities(const ComplexVector& momentum_amplitudes) const;
  /// Probability within two grid points of either window edge.
  double boundary_mass(const ComplexVector& momentum_amplitudes) const;
  /// Momentum-basis amplitudes of the position eigenstate |x_j>.
  ComplexVector position_eigenstate(Index j) const;
};

PointerBasis build_pointer(const ApparatusSpec& spec);

/// Normalized Gaussian with position amplitudes exp(-(x_j - x0)^2 / (4 sigma^2)).
Ket gaussian_pointer(const PointerBasis& basis, double x0, double sigma);

/// exp(-i P delta) psi. An integer multiple of dx is an exact circular shift
/// of the position amplitudes.
Ket translate(const PointerBasis& basis, const Ket& psi, double delta,
              BoundaryPolicy policy = BoundaryPolicy::Warn);

/// exp(-i H_A t) psi.
Ket free_evolve(const PointerBasis& basis, const Ket& psi, double t);

double mean_position(const PointerBasis& basis, const Ket& psi);
double position_variance(const PointerBasis& basis, const Ket& psi);

}  // namespace protmeas
