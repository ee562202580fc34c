#pragma once

// Dense complex linear algebra and quantum-mechanical primitives.
//
// Composite spaces are always ordered system (x) apparatus; the joint index of
// (s, a) is s * d_A + a.

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace protmeas {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Finite-dimensional Hermitian matrix. Construction rejects non-square,
/// non-finite or non-Hermitian input and stores the exact Hermitian part.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix matrix);

  static HermitianOperator diagonal(const RealVector& entries);
  static HermitianOperator identity(Index dim);
  static HermitianOperator zero(Index dim);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }

  /// Largest eigenvalue magnitude.
  double spectral_norm() const;
  /// Largest minus smallest eigenvalue.
  double spectral_range() const;

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;

 private:
  ComplexMatrix matrix_;
};

inline HermitianOperator operator*(double scale, const HermitianOperator& op) {
  return op * scale;
}

/// Unit-norm state vector.
class Ket {
 public:
  /// Throws NumericalError unless | ||amplitudes|| - 1 | <= tol::norm.
  explicit Ket(ComplexVector amplitudes);

  /// Rescales a nonzero vector to unit norm.
  static Ket normalized(ComplexVector v);
  static Ket basis(Index dim, Index k);

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Index dim() const noexcept { return amplitudes_.size(); }
  Complex operator[](Index i) const { return amplitudes_(i); }

 private:
  ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix matrix);

  static DensityMatrix from_pure(const Ket& psi);
  static DensityMatrix maximally_mixed(Index dim);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Index dim() const noexcept { return matrix_.rows(); }
  /// Eigenvalues in ascending order.
  RealVector spectrum() const;

 private:
  ComplexMatrix matrix_;
};

/// Spectral decomposition: ascending eigenvalues and orthonormal eigenvector
/// columns with the largest-magnitude component of each column real-positive.
struct EigenSystem {
  RealVector values;
  ComplexMatrix vectors;

  Index dim() const noexcept { return values.size(); }
  Ket vector(Index k) const;
};

EigenSystem eigh(const HermitianOperator& h);

/// exp(-i H t) with hbar = 1, evaluated as V exp(-i lambda t) V^dagger.
ComplexMatrix propagator(const HermitianOperator& h, double t);
ComplexMatrix propagator(const EigenSystem& eig, double t);

/// Kronecker product, first factor outermost.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
Ket tensor(const Ket& a, const Ket& b);

enum class Subsystem { System, Apparatus };

struct Bipartition {
  Index system = 0;
  Index apparatus = 0;

  Index joint() const noexcept { return system * apparatus; }
  Index kept(Subsystem keep) const noexcept {
    return keep == Subsystem::System ? system : apparatus;
  }
  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

DensityMatrix partial_trace(const DensityMatrix& rho, Bipartition dims, Subsystem keep);
/// Reduced state of a pure joint state, computed without forming |psi><psi|.
DensityMatrix reduced_state(const Ket& joint, Bipartition dims, Subsystem keep);

/// <psi|O|psi>; throws NumericalError if the imaginary part exceeds
/// tol::imag_residue.
double expectation(const HermitianOperator& op, const Ket& psi);

/// Von Neumann entropy in bits.
double entanglement_entropy(const DensityMatrix& rho);

/// <psi|rho|psi>.
double fidelity_pure(const Ket& psi, const DensityMatrix& rho);

namespace pauli {
HermitianOperator x();
HermitianOperator y();
HermitianOperator z();
HermitianOperator identity();
}  // namespace pauli

}  // namespace protmeas
