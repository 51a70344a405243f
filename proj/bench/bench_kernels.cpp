// OpenMP kernels against the serial reference on a critical configuration.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fkising/kernels.hpp"
#include "fkising/sampler.hpp"

using namespace fkising;

namespace {

struct Fixture {
  LatticeDomain d;
  SpinConfig sigma;
  BondConfig omega;
  CounterRng rng{1, 0};
  double p = bond_probability(kBetaCritical);
};

Fixture make(int side) {
  Fixture f;
  f.d = build_box(1.0 / side, side);
  SimParams params;
  params.a = 1.0 / side;
  Chain chain(f.d, params, BoundaryCondition::Free);
  for (int i = 0; i < 50; ++i) chain.sweep();
  f.sigma = chain.spins();
  f.omega = chain.bonds();
  return f;
}

template <bool Reference>
void BM_sample_bonds(benchmark::State& state) {
  auto f = make(static_cast<int>(state.range(0)));
  BondConfig out;
  std::uint64_t step = 0;
  for (auto _ : state) {
    if constexpr (Reference) {
      kernels::reference::sample_bonds(f.d, f.sigma, f.p, BoundaryCondition::Free, f.rng, step++, out);
    } else {
      kernels::sample_bonds(f.d, f.sigma, f.p, BoundaryCondition::Free, f.rng, step++, out);
    }
    benchmark::DoNotOptimize(out.bonds.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.d.num_edges()));
}

template <bool Reference>
void BM_label_clusters(benchmark::State& state) {
  auto f = make(static_cast<int>(state.range(0)));
  kernels::LabelWorkspace ws;
  kernels::ClusterLabels labels;
  for (auto _ : state) {
    if constexpr (Reference) {
      kernels::reference::label_clusters(f.d, f.omega, BoundaryCondition::Free, ws, labels);
    } else {
      kernels::label_clusters(f.d, f.omega, BoundaryCondition::Free, ws, labels);
    }
    benchmark::DoNotOptimize(labels.label.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.d.num_sites()));
}

template <bool Reference>
void BM_separable_transform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)) + 1, modes = 128;
  std::mt19937 gen(3);
  std::normal_distribution<double> g;
  std::vector<double> w(static_cast<std::size_t>(n) * n), sx(static_cast<std::size_t>(modes) * n), sy(sx.size()), out;
  for (auto& v : w) v = g(gen);
  for (auto& v : sx) v = g(gen);
  for (auto& v : sy) v = g(gen);
  for (auto _ : state) {
    if constexpr (Reference) {
      kernels::reference::separable_transform(w, n, n, sx, modes, sy, modes, out);
    } else {
      kernels::separable_transform(w, n, n, sx, modes, sy, modes, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_sample_bonds<false>)->Arg(128)->Arg(512);
BENCHMARK(BM_sample_bonds<true>)->Arg(128)->Arg(512);
BENCHMARK(BM_label_clusters<false>)->Arg(128)->Arg(512);
BENCHMARK(BM_label_clusters<true>)->Arg(128)->Arg(512);
BENCHMARK(BM_separable_transform<false>)->Arg(256);
BENCHMARK(BM_separable_transform<true>)->Arg(256);

BENCHMARK_MAIN();
