#pragma once

#include <cstddef>

// Numerical tolerances and thresholds used across the library.
namespace protmeas::tol {

// ||M - M^dagger||_max accepted when constructing a HermitianOperator.
inline constexpr double hermitian = 1e-12;
// | ||psi||_2 - 1 | accepted for a Ket.
inline constexpr double norm = 1e-10;
// |Tr rho - 1| accepted for a DensityMatrix.
inline constexpr double trace = 1e-10;
// Most negative eigenvalue accepted for a DensityMatrix.
inline constexpr double psd = 1e-10;
// Imaginary residue above which an expectation value is rejected.
inline constexpr double imag_residue = 1e-8;
// Orthonormality of eigenvector sets returned by eigh.
inline constexpr double orthonormal = 1e-10;

// Minimum separation between the protected level and every other level.
inline constexpr double gap_min = 1e-6;
// Pointer probability mass allowed within two grid points of the window edge.
inline constexpr double boundary_mass = 1e-6;
// Fidelity threshold for "returned to the initial state" after readout.
inline constexpr double epsilon_back = 1e-3;
// Adiabatic-validity indicator below which perturbative comparisons are made.
inline constexpr double validity_gate = 0.1;
// Largest joint dimension evolved by full diagonalization.
inline constexpr std::size_t max_joint_dim = 8192;
// Grid spacing must resolve this fraction of the observable's spectral range.
inline constexpr double resolution_fraction = 1.0 / 8.0;

}  // namespace protmeas::tol
