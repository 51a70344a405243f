#include <omp.h>

#include <cmath>
#include <queue>
#include <random>

#include "doctest.h"
#include "fkising/kernels.hpp"
#include "fkising/rng.hpp"

using namespace fkising;

namespace {

SpinConfig random_spins(const LatticeDomain& d, std::mt19937_64& gen, double plus = 0.5) {
  std::bernoulli_distribution b(plus);
  SpinConfig s(d.num_sites());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = b(gen) ? 1 : -1;
  return s;
}

BondConfig random_bonds(const LatticeDomain& d, std::mt19937_64& gen, double p, BoundaryCondition bc) {
  std::bernoulli_distribution b(p);
  BondConfig w(d.num_edges());
  for (auto e : d.internal_edges()) w[e] = b(gen);
  if (bc == BoundaryCondition::PlusWired)
    for (auto e : d.external_edges()) w[e] = b(gen);
  return w;
}

}  // namespace

TEST_SUITE("kernels") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    using C = Philox::Counter;
    CHECK(Philox::generate(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  }

  TEST_CASE("threshold32") {
    CHECK(threshold32(0.0) == 0);
    CHECK(threshold32(1.0) == (std::uint64_t{1} << 32));
    CHECK(threshold32(0.5) == (std::uint64_t{1} << 31));
    const double p = 2.0 - std::sqrt(2.0);
    CHECK(std::fabs(threshold32(p) / 4294967296.0 - p) <= std::ldexp(1.0, -33));
  }

  TEST_CASE("plus_probability") {
    CHECK(kernels::plus_probability(0.0) == 0.5);
    CHECK(kernels::plus_probability(0.5 * std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(kernels::plus_probability(800.0) == 1.0);
    CHECK(kernels::plus_probability(-800.0) == 0.0);
  }

  TEST_CASE("OpenMP kernels reproduce the serial reference at any thread count") {
    std::mt19937_64 gen(11);
    const CounterRng rng(5, 3);
    for (auto rect : {Rect{0, 0, 0, 0}, Rect{0, 0, 1, 0}, Rect{0, 0, 7, 3}, Rect{0, 0, 40, 33}, Rect{0, 0, 3, 60},
                      Rect{0, 0, 80, 70}, Rect{0, 0, 2, 2000}}) {
      const auto d = build_domain(1.0, rect);
      for (auto bc : {BoundaryCondition::Free, BoundaryCondition::PlusWired}) {
        for (int threads : {1, 2, 3, 7}) {
          omp_set_num_threads(threads);
          const auto sigma = random_spins(d, gen, 0.7);
          for (std::uint64_t step : {0ull, 1ull, 123456789ull}) {
            BondConfig b1, b2;
            kernels::sample_bonds(d, sigma, 0.6, bc, rng, step, b1);
            kernels::reference::sample_bonds(d, sigma, 0.6, bc, rng, step, b2);
            CHECK(b1 == b2);

            kernels::LabelWorkspace w1, w2;
            kernels::ClusterLabels l1, l2;
            kernels::label_clusters(d, b1, bc, w1, l1);
            kernels::reference::label_clusters(d, b2, bc, w2, l2);
            CHECK(l1.label == l2.label);
            CHECK(l1.size == l2.size);
            CHECK(l1.boundary == l2.boundary);

            std::vector<std::int8_t> s1, s2;
            kernels::draw_cluster_signs(l1, 0.01, rng, step, s1);
            kernels::reference::draw_cluster_signs(l2, 0.01, rng, step, s2);
            CHECK(s1 == s2);
            SpinConfig o1(d.num_sites()), o2(d.num_sites());
            kernels::assign_spins(l1, s1, o1);
            kernels::reference::assign_spins(l2, s2, o2);
            CHECK(o1 == o2);

            // One cluster per site, enough clusters for the parallel sign path.
            kernels::LabelWorkspace wc;
            kernels::ClusterLabels lc;
            kernels::label_clusters(d, BondConfig::all_closed(d), BoundaryCondition::Free, wc, lc);
            std::vector<std::int8_t> c1, c2;
            kernels::draw_cluster_signs(lc, 0.01, rng, step, c1);
            kernels::reference::draw_cluster_signs(lc, 0.01, rng, step, c2);
            CHECK(c1 == c2);

            if (d.nx() > 8 && d.ny() > 8) {
              std::vector<double> val(d.num_sites());
              for (std::size_t i = 0; i < val.size(); ++i) val[i] = o1[i];
              std::vector<double> tmean(l1.num_clusters(), 0.3);
              const kernels::Window wx{1, d.nx() - 5, 0, d.ny() - 1}, wy{0, d.nx() - 1, 2, d.ny() - 6};
              CHECK(kernels::pair_sum(d, val, 4, wx, wy) ==
                    doctest::Approx(kernels::reference::pair_sum(d, val, 4, wx, wy)).epsilon(1e-12));
              CHECK(kernels::connected_pair_count(d, l1.label, 4, wx, wy) ==
                    kernels::reference::connected_pair_count(d, l2.label, 4, wx, wy));
              CHECK(kernels::conditional_pair_sum(d, l1.label, tmean, 4, wx, wy) ==
                    doctest::Approx(kernels::reference::conditional_pair_sum(d, l2.label, tmean, 4, wx, wy))
                        .epsilon(1e-12));
            }
          }
        }
      }
    }
    omp_set_num_threads(kernels::max_threads());
  }

  TEST_CASE("labels agree with a breadth-first search") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 40; ++trial) {
      const int nx = 1 + static_cast<int>(gen() % 64), ny = 1 + static_cast<int>(gen() % 64);
      const auto d = build_domain(1.0, {0, 0, double(nx - 1), double(ny - 1)});
      const auto bc = trial % 2 ? BoundaryCondition::PlusWired : BoundaryCondition::Free;
      const auto w = random_bonds(d, gen, 0.3 + 0.4 * (trial % 3) / 2.0, bc);
      kernels::LabelWorkspace ws;
      kernels::ClusterLabels lab;
      kernels::label_clusters(d, w, bc, ws, lab);
      // BFS with a ghost vertex index N for the wired boundary.
      const std::size_t n = d.num_sites();
      std::vector<int> comp(n + 1, -1);
      int next = 0;
      auto bfs = [&](std::size_t start) {
        std::queue<std::size_t> q;
        q.push(start);
        comp[start] = next;
        while (!q.empty()) {
          const std::size_t v = q.front();
          q.pop();
          auto visit = [&](std::size_t u) {
            if (comp[u] < 0) {
              comp[u] = next;
              q.push(u);
            }
          };
          if (v == n) {
            for (auto e : d.external_edges())
              if (w.open(e)) visit(static_cast<std::size_t>(d.edge_info(e).first));
            continue;
          }
          for (Dir dir : kAllDirs) {
            const auto e = d.edge(static_cast<SiteIndex>(v), dir);
            if (!w.open(e)) continue;
            const auto nb = d.neighbor_site(static_cast<SiteIndex>(v), dir);
            visit(nb ? static_cast<std::size_t>(*nb) : n);
          }
        }
        ++next;
      };
      if (bc == BoundaryCondition::PlusWired) bfs(n);
      for (std::size_t s = 0; s < n; ++s)
        if (comp[s] < 0) bfs(s);
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = s + 1; t < std::min(n, s + 70); ++t) CHECK((comp[s] == comp[t]) == (lab.label[s] == lab.label[t]));
      bool has_boundary = false;
      for (std::size_t s = 0; s < n; ++s) {
        const bool on_b = bc == BoundaryCondition::PlusWired && comp[s] == comp[n];
        has_boundary = has_boundary || on_b;
        CHECK(on_b == (lab.label[s] == lab.boundary));
      }
      if (!has_boundary) CHECK(lab.boundary == -1);
      std::vector<int> count(lab.num_clusters(), 0);
      for (auto l : lab.label) count[l]++;
      for (std::size_t c = 0; c < count.size(); ++c) CHECK(count[c] == lab.size[c]);
    }
  }

  TEST_CASE("separable transform matches direct sums bitwise across threads") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-1, 1);
    const int nx = 37, ny = 23, mx = 5, my = 4;
    std::vector<double> w(nx * ny), sx(mx * nx), sy(my * ny);
    for (auto& v : w) v = u(gen);
    for (auto& v : sx) v = u(gen);
    for (auto& v : sy) v = u(gen);
    std::vector<double> ref, out;
    kernels::reference::separable_transform(w, nx, ny, sx, mx, sy, my, ref);
    for (int threads : {1, 3}) {
      omp_set_num_threads(threads);
      kernels::separable_transform(w, nx, ny, sx, mx, sy, my, out);
      CHECK(out == ref);
    }
    omp_set_num_threads(kernels::max_threads());
    for (int m = 0; m < mx; ++m)
      for (int n = 0; n < my; ++n) {
        double direct = 0.0;
        for (int y = 0; y < ny; ++y)
          for (int x = 0; x < nx; ++x) direct += w[y * nx + x] * sx[m * nx + x] * sy[n * ny + y];
        CHECK(ref[m * my + n] == doctest::Approx(direct).epsilon(1e-12));
      }
  }

  TEST_CASE("bond open frequency equals p") {
    // 2x2 all plus at beta_c: every internal edge open i.i.d. with p = 2 - sqrt 2.
    const auto d = build_domain(1.0, {0, 0, 1, 1});
    const CounterRng rng(1, 0);
    const double p = 2.0 - std::sqrt(2.0);
    const auto sigma = SpinConfig::all_plus(d);
    BondConfig w;
    double open = 0.0;
    const int n = 200000;
    for (int step = 0; step < n; ++step) {
      kernels::sample_bonds(d, sigma, p, BoundaryCondition::Free, rng, step, w);
      for (auto e : d.internal_edges()) open += w[e];
      for (auto e : d.external_edges()) CHECK_FALSE(w.open(e));
    }
    const double f = open / (4.0 * n);
    CHECK(std::fabs(f - p) < 4.0 * std::sqrt(p * (1 - p) / (4.0 * n)));
  }
}
