#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <set>

#include "oracles.hpp"
#include "protmeas/errors.hpp"
#include "protmeas/readout.hpp"
#include "protmeas/rng.hpp"

using namespace protmeas;

namespace {

ProtectiveSetup qubit(const HermitianOperator& o, double T) {
  return ProtectiveSetup{
      .system = {.hamiltonian = pauli::z(), .n_index = 0, .observable = o}, .apparatus = {}, .T = T};
}

}  // namespace

TEST(Philox, KnownAnswerVectors) {
  for (const auto& kat : oracle::philox_kats()) {
    EXPECT_EQ(Philox4x32::block(kat.counter, kat.key), kat.expected);
  }
}

TEST(CounterStream, DeterministicAndInRange) {
  CounterStream a(42);
  CounterStream b(42);
  CounterStream c(43);
  int same_as_c = 0;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    same_as_c += u == c.uniform() ? 1 : 0;
  }
  EXPECT_EQ(same_as_c, 0);
  // The first block with counter 0 under key 0 is the first known-answer vector.
  CounterStream zero(0);
  const std::uint64_t first = zero.next_u64();
  EXPECT_EQ(first, (std::uint64_t{0xe169c58d} << 32) | 0x6627e8d5);
}

TEST(CounterStream, UniformMeanAndVariance) {
  CounterStream s(7);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    sum += u;
    sum_sq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sum_sq / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(DeriveSeed, DistinctAcrossIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    seen.insert(derive_seed(99, i));
  }
  EXPECT_EQ(seen.size(), 10000U);
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(SamplePosition, FrequenciesMatchBornMarginal) {
  const ExactEvolver ev(qubit(pauli::x(), 4.0));
  const JointState psi = ev.evolve_protected();
  const PointerBasis& b = ev.pointer();
  RealVector p = RealVector::Zero(b.dim());
  for (Index s = 0; s < 2; ++s) {
    p += b.position_probabilities(psi.ket.amplitudes().segment(s * b.dim(), b.dim()));
  }
  const int n = 10000;
  std::vector<int> counts(static_cast<std::size_t>(b.dim()), 0);
  for (int i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(sample_position(psi, b, derive_seed(5, i)).grid_index)];
  }
  // Pearson statistic over cells with expected count >= 5; the remainder is
  // pooled into one cell.
  double chi2 = 0.0;
  int cells = 0;
  double pooled_expected = 0.0;
  double pooled_observed = 0.0;
  for (Index j = 0; j < b.dim(); ++j) {
    const double e = n * p(j);
    const double o = counts[static_cast<std::size_t>(j)];
    if (e >= 5.0) {
      chi2 += (o - e) * (o - e) / e;
      ++cells;
    } else {
      pooled_expected += e;
      pooled_observed += o;
    }
  }
  if (pooled_expected > 0.0) {
    chi2 += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) / pooled_expected;
    ++cells;
  }
  const boost::math::chi_squared dist(cells - 1);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.999)) << cells << " cells";
}

TEST(SamplePosition, CollapseIsPositionEigenstate) {
  const ExactEvolver ev(qubit(pauli::x(), 4.0));
  const PositionSample s = sample_position(ev.evolve_protected(), ev.pointer(), 123);
  EXPECT_GT(s.probability, 0.0);
  const ComplexVector ptr = s.collapsed.ket.amplitudes().segment(128, 128) / s.system[1];
  EXPECT_LT((ptr - ev.pointer().position_eigenstate(s.grid_index)).norm(), 1e-10);
  EXPECT_EQ(s.x, ev.pointer().position(s.grid_index));
}

TEST(ReadOut, CommutingCaseAlwaysProjectsBack) {
  const TrialStatistics st = monte_carlo(qubit(pauli::z(), 2.0), 500, 77, {}, {}, true);
  EXPECT_EQ(st.freq_disturbed, 0.0);
  EXPECT_EQ(st.freq_low_fidelity, 0.0);
  for (const auto& t : st.trials) {
    EXPECT_TRUE(t.projected_back);
    EXPECT_TRUE(t.found_in_initial);
    EXPECT_NEAR(t.fidelity, 1.0, 1e-12);
  }
  EXPECT_NEAR(st.mean_estimate, -1.0, 5.0 * st.std_error);
}

TEST(ReadOut, SingleTrialMatchesMonteCarloRecord) {
  const ProtectiveSetup s = qubit(pauli::x(), 2.0);
  const TrialStatistics st = monte_carlo(s, 3, 11, {}, {}, true);
  for (std::uint64_t i = 0; i < 3; ++i) {
    const ReadoutOutcome r = run_trial(s, derive_seed(11, i));
    EXPECT_EQ(r.x_sampled, st.trials[i].x_sampled);
    EXPECT_EQ(r.found_in_initial, st.trials[i].found_in_initial);
  }
}

TEST(MonteCarlo, DisturbanceFrequencyWithinThreeSigma) {
  const double base = resonance_free_base(2.0);
  const TrialStatistics a = monte_carlo(qubit(pauli::x(), base), 10000, 12345);
  const TrialStatistics b = monte_carlo(qubit(pauli::x(), 2.0 * base), 10000, 12345);
  EXPECT_NEAR(a.freq_disturbed, a.exact_disturbance, 3.0 * binomial_std_error(a.exact_disturbance, 10000));
  EXPECT_NEAR(b.freq_disturbed, b.exact_disturbance, 3.0 * binomial_std_error(b.exact_disturbance, 10000));
  const double ratio = a.freq_disturbed / b.freq_disturbed;
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.3);
}

TEST(MonteCarlo, RejectsZeroTrials) {
  EXPECT_THROW(monte_carlo(qubit(pauli::x(), 2.0), 0, 1), ConfigurationError);
}

TEST(BinomialStdError, Values) {
  EXPECT_NEAR(binomial_std_error(0.5, 100), 0.05, 1e-15);
  EXPECT_EQ(binomial_std_error(0.0, 100), 0.0);
}
