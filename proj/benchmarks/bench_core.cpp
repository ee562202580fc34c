#include <benchmark/benchmark.h>

#include <random>

#include "protmeas/protective.hpp"
#include "protmeas/readout.hpp"
#include "protmeas/tomography.hpp"

using namespace protmeas;

namespace {

HermitianOperator random_hermitian(Index n) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      m(i, j) = Complex(g(rng), g(rng));
    }
  }
  return HermitianOperator((m + m.adjoint()) * 0.5);
}

ProtectiveSetup qubit(Index d_a, double T) {
  return ProtectiveSetup{.system = {.hamiltonian = pauli::z(), .n_index = 0, .observable = pauli::x()},
                         .apparatus = {.dim = d_a},
                         .T = T};
}

}  // namespace

static void BM_Eigh(benchmark::State& state) {
  const HermitianOperator h = random_hermitian(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigh(h));
  }
}
BENCHMARK(BM_Eigh)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

// Joint dimension is 2 * d_A.
static void BM_ExactEvolver(benchmark::State& state) {
  const ProtectiveSetup s = qubit(state.range(0), 100.0);
  for (auto _ : state) {
    ExactEvolver ev(s);
    benchmark::DoNotOptimize(ev.evolve_protected());
  }
}
BENCHMARK(BM_ExactEvolver)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Analyze(benchmark::State& state) {
  const ProtectiveSetup s = qubit(128, 100.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze(s));
  }
}
BENCHMARK(BM_Analyze)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
  const ProtectiveSetup s = qubit(128, 100.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo(s, static_cast<std::uint64_t>(state.range(0)), 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Tomography(benchmark::State& state) {
  const Ket plus = Ket::normalized(ComplexVector::Ones(2));
  const TomographyEngine engine(plus, 2.0, 200.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.run(TomographyMode::Sampled, ++seed));
  }
}
BENCHMARK(BM_Tomography)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
