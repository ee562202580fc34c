#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "protmeas/errors.hpp"
#include "protmeas/fit.hpp"
#include "protmeas/protective.hpp"

using namespace protmeas;

namespace {

HermitianOperator tilted() {
  return HermitianOperator((pauli::x().matrix() + pauli::z().matrix()) / std::sqrt(2.0));
}

ProtectiveSetup qubit(const HermitianOperator& o, double T, ApparatusSpec a = {}) {
  return ProtectiveSetup{
      .system = {.hamiltonian = pauli::z(), .n_index = 0, .observable = o}, .apparatus = a, .T = T};
}

std::vector<double> as_std(const RealVector& v) { return {v.data(), v.data() + v.size()}; }

// Sweep T_k = 2^k * pi/3 and collect reports whose validity indicator is
// below the gate.
struct Sweep {
  std::vector<double> T;
  std::vector<EvolutionReport> reports;
};

Sweep gated_sweep(const HermitianOperator& o, int first, int last, const EvolutionOptions& opts = {}) {
  Sweep s;
  for (double T : dyadic_schedule(resonance_free_base(2.0), first, last)) {
    EvolutionReport r = analyze(qubit(o, T), opts);
    if (r.validity_indicator < tol::validity_gate) {
      s.T.push_back(T);
      s.reports.push_back(std::move(r));
    }
  }
  return s;
}

template <typename F>
std::vector<double> field(const Sweep& s, F f) {
  std::vector<double> out;
  for (const auto& r : s.reports) {
    out.push_back(f(r));
  }
  return out;
}

}  // namespace

TEST(Validate, ReportsEachViolation) {
  EXPECT_THROW(validate(qubit(pauli::x(), 0.0)), ConfigurationError);
  EXPECT_THROW(validate(qubit(HermitianOperator::identity(3), 1.0)), DimensionError);

  ProtectiveSetup bad_n = qubit(pauli::x(), 1.0);
  bad_n.system.n_index = 2;
  EXPECT_THROW(validate(bad_n), ConfigurationError);

  ProtectiveSetup degenerate = qubit(pauli::x(), 1.0);
  degenerate.system.hamiltonian = pauli::identity();
  EXPECT_THROW(validate(degenerate), ConfigurationError);

  // dx = pi / 2 cannot resolve shifts of a Pauli observable (range 2).
  EXPECT_THROW(validate(qubit(pauli::x(), 1.0, {.dim = 128, .p_max = 2.0, .sigma = 2.0})),
               ConfigurationError);
  // A multiple of the identity has nothing to resolve.
  EXPECT_NO_THROW(validate(qubit(pauli::identity(), 1.0, {.dim = 128, .p_max = 2.0, .sigma = 2.0})));
}

TEST(AssembleHamiltonian, MatchesTensorFormula) {
  const ApparatusSpec a{.dim = 16, .p_max = 4.0, .sigma = 1.0, .mass_inv = 0.3};
  const ProtectiveSetup s = qubit(pauli::x(), 4.0, a);
  const HermitianOperator h = assemble_hamiltonian(s);
  const PointerBasis b = build_pointer(a);
  for (Index si = 0; si < 2; ++si) {
    for (Index ti = 0; ti < 2; ++ti) {
      for (Index i = 0; i < 16; ++i) {
        for (Index j = 0; j < 16; ++j) {
          Complex expected = 0.0;
          if (i == j) {
            expected += pauli::z().matrix()(si, ti);
            expected += pauli::x().matrix()(si, ti) * b.momentum(i) / 4.0;
            if (si == ti) {
              expected += 0.3 * b.momentum(i) * b.momentum(i);
            }
          }
          EXPECT_LT(std::abs(h.matrix()(si * 16 + i, ti * 16 + j) - expected), 1e-14);
        }
      }
    }
  }
}

TEST(ExactEvolver, MatchesSectorwiseOracle) {
  std::mt19937_64 rng(17);
  const ApparatusSpec a{.dim = 64, .p_max = 16.0, .sigma = 0.5, .mass_inv = 0.05};
  for (int trial = 0; trial < 3; ++trial) {
    const ComplexMatrix hs = oracle::random_hermitian(3, rng);
    const ComplexMatrix o = oracle::random_hermitian(3, rng);
    const ProtectiveSetup s{
        .system = {.hamiltonian = HermitianOperator(hs), .n_index = 1, .observable = HermitianOperator(o)},
        .apparatus = a,
        .T = 2.5 + trial};
    const ExactEvolver ev(s);
    const ComplexVector chi = oracle::random_state(3, rng);
    const ComplexVector got = ev.evolve(Ket(chi)).ket.amplitudes();
    const ComplexVector want = oracle::evolve_sectorwise(
        hs, o, chi, ev.initial_pointer().amplitudes(), as_std(ev.pointer().momentum), a.mass_inv, s.T);
    EXPECT_LT((got - want).norm(), 1e-9) << "trial " << trial;
  }
}

TEST(ExactEvolver, ConditionedEigensystemAgreesWithSector) {
  const ProtectiveSetup s = qubit(tilted(), 7.0);
  const EigenSystem e = conditioned_eigensystem(s, 3.0);
  const ComplexMatrix h = pauli::z().matrix() + tilted().matrix() * (3.0 / 7.0);
  EXPECT_LT((propagator(e, 7.0) - oracle::expm_taylor(h, 7.0)).norm(), 1e-11);
}

TEST(ExactEvolver, ResourceCapCheckedFirst) {
  EvolutionOptions o;
  o.max_joint_dim = 128;
  EXPECT_THROW(ExactEvolver(qubit(pauli::x(), 10.0), o), ResourceError);
}

TEST(ExactEvolver, StrictBoundary) {
  // O = 2.5 sigma_z carries the packet from x0 = 2 to 4.5 on level |0>, within
  // about 3 sigma of the window edge at 6.3.
  const ApparatusSpec a{.dim = 64, .p_max = 16.0, .x0 = 2.0, .sigma = 0.5};
  EvolutionOptions o;
  o.boundary = BoundaryPolicy::Strict;
  ProtectiveSetup s = qubit(pauli::z() * 2.5, 10.0, a);
  s.system.n_index = 1;
  EXPECT_THROW(evolve_exact(s, o), BoundaryError);
  s.system.n_index = 0;
  EXPECT_NO_THROW(evolve_exact(s, o));
}

TEST(Analyze, CommutingCaseIsExact) {
  for (const double T : {0.5, 3.0, 100.0, 1e4}) {
    const EvolutionReport r = analyze(qubit(pauli::z(), T));
    EXPECT_LE(r.disturbance_prob, 1e-12);
    EXPECT_LE(r.entropy_bits, 1e-12);
    EXPECT_NEAR(r.pointer_shift, -1.0, 1e-10);
    EXPECT_LT(r.pert_error, 1e-10);
  }
}

TEST(Analyze, LargeTCouplingIsNegligible) {
  const ApparatusSpec a{.dim = 32, .p_max = 16.0, .sigma = 0.5};
  const ProtectiveSetup s = qubit(pauli::x(), 1e12, a);
  const PointerBasis b = build_pointer(a);
  const ComplexMatrix coupling = assemble_hamiltonian(s).matrix() -
                                 tensor(pauli::z().matrix(), ComplexMatrix::Identity(32, 32));
  const double norm = HermitianOperator(coupling).spectral_norm();
  EXPECT_LE(norm, 1e-12 * pauli::x().spectral_norm() * a.p_max * (1.0 + 1e-12));
  EXPECT_GT(norm, 0.0);
}

TEST(Analyze, ValidityIndicatorFormula) {
  const ProtectiveSetup s = qubit(pauli::x() * 3.0, 40.0);
  EXPECT_NEAR(validity_indicator(s), 16.0 * 3.0 / (40.0 * 2.0), 1e-12);
}

TEST(Analyze, PointerShiftConverges) {
  const Sweep s = gated_sweep(tilted(), 3, 10);
  ASSERT_GE(s.T.size(), 4U);
  const auto err = field(s, [](const auto& r) { return std::abs(r.pointer_shift - r.expectation_target); });
  for (std::size_t i = 1; i < err.size(); ++i) {
    EXPECT_LE(err[i], err[i - 1]);
  }
  EXPECT_LE(loglog_fit(s.T, err).slope, -0.9);
  EXPECT_NEAR(s.reports.front().expectation_target, -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Analyze, DisturbanceAndEntropyScaleAsInverseSquare) {
  const Sweep s = gated_sweep(pauli::x(), 3, 14);
  ASSERT_GE(s.T.size(), 6U);
  EXPECT_GE(std::log10(s.T.back() / s.T.front()), 2.0);
  const double d_slope = loglog_fit(s.T, field(s, [](const auto& r) { return r.disturbance_prob; })).slope;
  const double e_slope = loglog_fit(s.T, field(s, [](const auto& r) { return r.entropy_bits; })).slope;
  EXPECT_NEAR(d_slope, -2.0, 0.1);
  EXPECT_NEAR(e_slope, -2.0, 0.2);
}

TEST(Perturbative, ErrorSlopesWithAndWithoutSecondOrderPhase) {
  const Sweep plain = gated_sweep(tilted(), 3, 10);
  EvolutionOptions o;
  o.second_order_phase = true;
  const Sweep phased = gated_sweep(tilted(), 3, 10, o);
  ASSERT_GE(plain.T.size(), 4U);
  EXPECT_LE(loglog_fit(plain.T, field(plain, [](const auto& r) { return r.pert_error; })).slope, -0.9);
  EXPECT_LE(loglog_fit(phased.T, field(phased, [](const auto& r) { return r.pert_error; })).slope, -1.8);
}

TEST(Perturbative, BranchWeightsMatchExactPopulations) {
  for (const int k : {9, 10}) {
    const EvolutionReport r = analyze(qubit(tilted(), std::ldexp(resonance_free_base(2.0), k)));
    ASSERT_GT(r.exact_populations[1], 0.0);
    EXPECT_NEAR(r.pert_branch_weights[1] / r.exact_populations[1], 1.0, 0.1);
    EXPECT_EQ(r.pert_branch_weights[0], 0.0);
  }
}

TEST(Perturbative, NormDeficitIsSecondOrder) {
  const double base = resonance_free_base(2.0);
  const double d1 = evolve_perturbative(qubit(pauli::x(), base * 256)).norm_deficit;
  const double d2 = evolve_perturbative(qubit(pauli::x(), base * 512)).norm_deficit;
  EXPECT_NEAR(d1 / d2, 4.0, 0.2);
}

TEST(Helpers, ProtectionHamiltonianAndSchedules) {
  const Ket plus = Ket::normalized(ComplexVector::Ones(2));
  const HermitianOperator h = protection_hamiltonian(plus, 3.0);
  const EigenSystem e = eigh(h);
  EXPECT_NEAR(e.values(0), -3.0, 1e-14);
  EXPECT_NEAR(e.values(1), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors.col(0).dot(plus.amplitudes())), 1.0, 1e-14);
  EXPECT_THROW(protection_hamiltonian(plus, 0.0), ConfigurationError);

  const double base = resonance_free_base(2.0);
  EXPECT_NEAR(base, std::numbers::pi / 3.0, 1e-15);
  for (const double T : dyadic_schedule(base, 0, 20)) {
    const double factor = std::norm(1.0 - std::polar(1.0, -2.0 * T));
    EXPECT_NEAR(factor, 3.0, 1e-6);
  }
  EXPECT_EQ(dyadic_schedule(1.0, 3, 5), (std::vector<double>{8.0, 16.0, 32.0}));
}
