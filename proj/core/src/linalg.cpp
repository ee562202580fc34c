#include "protmeas/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "protmeas/errors.hpp"
#include "protmeas/tolerances.hpp"

namespace protmeas {

namespace {

bool all_finite(const ComplexMatrix& m) {
  return m.real().allFinite() && m.imag().allFinite();
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

RealVector hermitian_spectrum(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver did not converge");
  }
  return solver.eigenvalues();
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a nonempty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

// ---------------------------------------------------------------- Hermitian

HermitianOperator::HermitianOperator(ComplexMatrix matrix) {
  require_square(matrix, "HermitianOperator");
  if (!all_finite(matrix)) {
    throw NumericalError("HermitianOperator: non-finite entry");
  }
  const double asym = max_abs(matrix - matrix.adjoint());
  if (asym > tol::hermitian) {
    throw NumericalError("HermitianOperator: ||M - M^dagger||_max = " + std::to_string(asym));
  }
  matrix_ = (matrix + matrix.adjoint()) * 0.5;
}

HermitianOperator HermitianOperator::diagonal(const RealVector& entries) {
  return HermitianOperator(entries.cast<Complex>().asDiagonal().toDenseMatrix());
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

double HermitianOperator::spectral_norm() const {
  return hermitian_spectrum(matrix_).cwiseAbs().maxCoeff();
}

double HermitianOperator::spectral_range() const {
  const RealVector s = hermitian_spectrum(matrix_);
  return s(s.size() - 1) - s(0);
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (other.dim() != dim()) {
    throw DimensionError("HermitianOperator sum: dimension mismatch");
  }
  return HermitianOperator(matrix_ + other.matrix_);
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return HermitianOperator(matrix_ * scale);
}

// ---------------------------------------------------------------------- Ket

Ket::Ket(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw DimensionError("Ket: empty amplitude vector");
  }
  const double n = amplitudes_.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > tol::norm) {
    throw NumericalError("Ket: norm " + std::to_string(n) + " is not 1");
  }
}

Ket Ket::normalized(ComplexVector v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("Ket::normalized: zero or non-finite vector");
  }
  return Ket(v / n);
}

Ket Ket::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) {
    throw DimensionError("Ket::basis: index out of range");
  }
  ComplexVector v = ComplexVector::Zero(dim);
  v(k) = 1.0;
  return Ket(std::move(v));
}

// ------------------------------------------------------------ DensityMatrix

DensityMatrix::DensityMatrix(ComplexMatrix matrix) {
  require_square(matrix, "DensityMatrix");
  if (!all_finite(matrix)) {
    throw NumericalError("DensityMatrix: non-finite entry");
  }
  const double asym = max_abs(matrix - matrix.adjoint());
  if (asym > tol::hermitian) {
    throw NumericalError("DensityMatrix: not Hermitian (" + std::to_string(asym) + ")");
  }
  matrix_ = (matrix + matrix.adjoint()) * 0.5;
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > tol::trace) {
    throw NumericalError("DensityMatrix: trace " + std::to_string(tr));
  }
  const double lowest = hermitian_spectrum(matrix_)(0);
  if (lowest < -tol::psd) {
    throw NumericalError("DensityMatrix: negative eigenvalue " + std::to_string(lowest));
  }
}

DensityMatrix DensityMatrix::from_pure(const Ket& psi) {
  return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

RealVector DensityMatrix::spectrum() const { return hermitian_spectrum(matrix_); }

// -------------------------------------------------------------- EigenSystem

Ket EigenSystem::vector(Index k) const { return Ket(vectors.col(k)); }

EigenSystem eigh(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: solver did not converge");
  }
  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  // Phase convention: the first component whose magnitude is within a relative
  // 1e-8 of the column maximum is made real-positive.
  for (Index k = 0; k < out.vectors.cols(); ++k) {
    auto col = out.vectors.col(k);
    const double peak = col.cwiseAbs().maxCoeff();
    Index pivot = 0;
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) >= peak * (1.0 - 1e-8)) {
        pivot = i;
        break;
      }
    }
    const Complex c = col(pivot);
    col *= std::conj(c) / std::abs(c);
  }
  return out;
}

ComplexMatrix propagator(const EigenSystem& eig, double t) {
  if (!std::isfinite(t)) {
    throw ConfigurationError("propagator: time must be finite");
  }
  ComplexVector phases(eig.dim());
  for (Index k = 0; k < eig.dim(); ++k) {
    phases(k) = std::polar(1.0, -eig.values(k) * t);
  }
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix propagator(const HermitianOperator& h, double t) {
  return propagator(eigh(h), t);
}

// ------------------------------------------------------------------ tensor

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(tensor(a.matrix(), b.matrix()));
}

Ket tensor(const Ket& a, const Ket& b) {
  return Ket::normalized(tensor(a.amplitudes(), b.amplitudes()));
}

// ------------------------------------------------------------ reductions

DensityMatrix partial_trace(const DensityMatrix& rho, Bipartition dims, Subsystem keep) {
  if (dims.system <= 0 || dims.apparatus <= 0 || dims.joint() != rho.dim()) {
    throw DimensionError("partial_trace: " + std::to_string(dims.system) + " x " +
                         std::to_string(dims.apparatus) + " does not match dimension " +
                         std::to_string(rho.dim()));
  }
  const Index ds = dims.system;
  const Index da = dims.apparatus;
  const ComplexMatrix& m = rho.matrix();
  if (keep == Subsystem::System) {
    ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
    for (Index s = 0; s < ds; ++s) {
      for (Index t = 0; t < ds; ++t) {
        out(s, t) = m.block(s * da, t * da, da, da).trace();
      }
    }
    return DensityMatrix(std::move(out));
  }
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (Index s = 0; s < ds; ++s) {
    out += m.block(s * da, s * da, da, da);
  }
  return DensityMatrix(std::move(out));
}

DensityMatrix reduced_state(const Ket& joint, Bipartition dims, Subsystem keep) {
  if (dims.system <= 0 || dims.apparatus <= 0 || dims.joint() != joint.dim()) {
    throw DimensionError("reduced_state: bipartition does not match state dimension");
  }
  // Row s of `coeffs` holds the apparatus amplitudes paired with system state s.
  const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      coeffs(joint.amplitudes().data(), dims.system, dims.apparatus);
  if (keep == Subsystem::System) {
    return DensityMatrix(coeffs * coeffs.adjoint());
  }
  return DensityMatrix((coeffs.transpose() * coeffs.conjugate()).eval());
}

double expectation(const HermitianOperator& op, const Ket& psi) {
  if (op.dim() != psi.dim()) {
    throw DimensionError("expectation: operator and state dimensions differ");
  }
  const Complex value = psi.amplitudes().dot(op.matrix() * psi.amplitudes());
  if (std::abs(value.imag()) > tol::imag_residue) {
    throw NumericalError("expectation: imaginary residue " + std::to_string(value.imag()));
  }
  return value.real();
}

double entanglement_entropy(const DensityMatrix& rho) {
  const RealVector lambda = rho.spectrum();
  double s = 0.0;
  for (Index k = 0; k < lambda.size(); ++k) {
    const double p = lambda(k);
    if (p > 0.0) {
      s -= p * std::log2(p);
    }
  }
  return std::clamp(s, 0.0, std::log2(static_cast<double>(rho.dim())));
}

double fidelity_pure(const Ket& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) {
    throw DimensionError("fidelity_pure: dimension mismatch");
  }
  return psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
}

// ------------------------------------------------------------------ Pauli

namespace pauli {

HermitianOperator x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return HermitianOperator(std::move(m));
}

HermitianOperator y() {
  ComplexMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return HermitianOperator(std::move(m));
}

HermitianOperator z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return HermitianOperator(std::move(m));
}

HermitianOperator identity() { return HermitianOperator::identity(2); }

}  // namespace pauli

}  // namespace protmeas
