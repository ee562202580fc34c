#include "protmeas/apparatus.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "protmeas/errors.hpp"
#include "protmeas/tolerances.hpp"

namespace protmeas {

namespace {

double grid_spacing(const ApparatusSpec& spec) { return std::numbers::pi / spec.p_max; }

void check_fit(const PointerBasis& basis, double x0, double sigma, const char* where) {
  const double half = basis.window / 2.0;
  if (!(sigma > basis.dx)) {
    std::ostringstream os;
    os << where << ": sigma " << sigma << " must exceed the grid spacing dx = " << basis.dx;
    throw ConfigurationError(os.str());
  }
  if (std::abs(x0) + 3.0 * sigma > half - basis.dx) {
    std::ostringstream os;
    os << where << ": |x0| + 3 sigma = " << std::abs(x0) + 3.0 * sigma
       << " exceeds the position window half-width " << half - basis.dx;
    throw ConfigurationError(os.str());
  }
}

}  // namespace

void validate(const ApparatusSpec& spec) {
  std::ostringstream os;
  if (spec.dim < 8 || spec.dim % 2 != 0) {
    os << "apparatus: d_A = " << spec.dim << " must be even and >= 8";
  } else if (!(spec.p_max > 0.0) || !std::isfinite(spec.p_max)) {
    os << "apparatus: p_max = " << spec.p_max << " must be positive";
  } else if (!(spec.sigma > 0.0) || !std::isfinite(spec.sigma)) {
    os << "apparatus: sigma = " << spec.sigma << " must be positive";
  } else if (!(spec.mass_inv >= 0.0) || !std::isfinite(spec.mass_inv)) {
    os << "apparatus: mass_inv = " << spec.mass_inv << " must be >= 0";
  } else if (!std::isfinite(spec.x0)) {
    os << "apparatus: x0 must be finite";
  } else {
    const double dx = grid_spacing(spec);
    const double half = 0.5 * static_cast<double>(spec.dim) * dx;
    if (!(spec.sigma > dx)) {
      os << "apparatus: sigma = " << spec.sigma << " must exceed the grid spacing dx = " << dx;
    } else if (std::abs(spec.x0) + 3.0 * spec.sigma > half - dx) {
      os << "apparatus: |x0| + 3 sigma = " << std::abs(spec.x0) + 3.0 * spec.sigma
         << " exceeds the position window half-width " << half - dx;
    }
  }
  if (!os.str().empty()) {
    throw ConfigurationError(os.str());
  }
}

PointerBasis build_pointer(const ApparatusSpec& spec) {
  validate(spec);
  const Index d = spec.dim;
  const double dx = grid_spacing(spec);
  const double dp = 2.0 * spec.p_max / static_cast<double>(d);

  RealVector a(d);
  RealVector x(d);
  for (Index k = 0; k < d; ++k) {
    a(k) = -spec.p_max + static_cast<double>(k) * dp;
    x(k) = static_cast<double>(k - d / 2) * dx;
  }

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  ComplexMatrix f(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      // a_i x_j = 2 pi (i - d/2)(j - d/2) / d; reduce the integer product
      // modulo d so the phase argument stays in [0, 2 pi).
      const long long ii = static_cast<long long>(i) - d / 2;
      const long long jj = static_cast<long long>(j) - d / 2;
      const long long r = ((ii * jj) % d + d) % d;
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d);
      f(i, j) = std::polar(inv_sqrt_d, -phase);
    }
  }

  // X = F diag(x) F^dagger is circulant in the momentum basis: entry (i, k)
  // depends only on (i - k) mod d.
  ComplexVector band(d);
  for (Index r = 0; r < d; ++r) {
    Complex sum = 0.0;
    for (Index j = 0; j < d; ++j) {
      const long long jj = static_cast<long long>(j) - d / 2;
      const long long q = ((static_cast<long long>(r) * jj) % d + d) % d;
      sum += x(j) * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(q) /
                                         static_cast<double>(d));
    }
    band(r) = sum / static_cast<double>(d);
  }
  ComplexMatrix xop(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index k = 0; k < d; ++k) {
      xop(i, k) = band(((i - k) % d + d) % d);
    }
  }
  xop = (xop + xop.adjoint()).eval() * 0.5;
  const RealVector a2 = a.cwiseProduct(a);

  return PointerBasis{
      .momentum = a,
      .position = x,
      .dp = dp,
      .dx = dx,
      .window = static_cast<double>(d) * dx,
      .mass_inv = spec.mass_inv,
      .momentum_op = HermitianOperator::diagonal(a),
      .position_op = HermitianOperator(std::move(xop)),
      .hamiltonian = HermitianOperator::diagonal(spec.mass_inv * a2),
      .fourier = std::move(f),
  };
}

ComplexVector PointerBasis::to_position(const ComplexVector& momentum_amplitudes) const {
  return fourier.adjoint() * momentum_amplitudes;
}

ComplexVector PointerBasis::to_momentum(const ComplexVector& position_amplitudes) const {
  return fourier * position_amplitudes;
}

RealVector PointerBasis::position_probabilities(const ComplexVector& momentum_amplitudes) const {
  return to_position(momentum_amplitudes).cwiseAbs2();
}

double PointerBasis::boundary_mass(const ComplexVector& momentum_amplitudes) const {
  const RealVector p = position_probabilities(momentum_amplitudes);
  const Index d = dim();
  return p(0) + p(1) + p(d - 2) + p(d - 1);
}

ComplexVector PointerBasis::position_eigenstate(Index j) const { return fourier.col(j); }

Ket gaussian_pointer(const PointerBasis& basis, double x0, double sigma) {
  check_fit(basis, x0, sigma, "gaussian_pointer");
  ComplexVector psi_x(basis.dim());
  for (Index j = 0; j < basis.dim(); ++j) {
    const double u = basis.position(j) - x0;
    psi_x(j) = std::exp(-u * u / (4.0 * sigma * sigma));
  }
  return Ket::normalized(basis.to_momentum(psi_x));
}

Ket translate(const PointerBasis& basis, const Ket& psi, double delta, BoundaryPolicy policy) {
  if (psi.dim() != basis.dim()) {
    throw DimensionError("translate: state dimension differs from the pointer grid");
  }
  ComplexVector out(psi.dim());
  for (Index i = 0; i < psi.dim(); ++i) {
    out(i) = std::polar(1.0, -basis.momentum(i) * delta) * psi[i];
  }
  const double edge = basis.boundary_mass(out);
  if (edge > tol::boundary_mass) {
    std::ostringstream os;
    os << "translate: pointer mass " << edge << " within two grid points of the window edge";
    if (policy == BoundaryPolicy::Strict) {
      throw BoundaryError(os.str());
    }
    std::cerr << "warning: " << os.str() << " (wraparound)\n";
  }
  return Ket::normalized(std::move(out));
}

Ket free_evolve(const PointerBasis& basis, const Ket& psi, double t) {
  if (basis.mass_inv == 0.0) {
    return psi;
  }
  ComplexVector out(psi.dim());
  for (Index i = 0; i < psi.dim(); ++i) {
    const double a = basis.momentum(i);
    out(i) = std::polar(1.0, -basis.mass_inv * a * a * t) * psi[i];
  }
  return Ket::normalized(std::move(out));
}

double mean_position(const PointerBasis& basis, const Ket& psi) {
  return basis.position_probabilities(psi.amplitudes()).dot(basis.position);
}

double position_variance(const PointerBasis& basis, const Ket& psi) {
  const RealVector p = basis.position_probabilities(psi.amplitudes());
  const double mean = p.dot(basis.position);
  return p.dot((basis.position.array() - mean).square().matrix());
}

}  // namespace protmeas
