#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "fkising/clusters.hpp"
#include "fkising/error.hpp"
#include "fkising/loops.hpp"

using namespace fkising;

namespace {

BondConfig random_free(const LatticeDomain& d, std::mt19937_64& gen, double p) {
  std::bernoulli_distribution b(p);
  BondConfig w(d.num_edges());
  for (auto e : d.internal_edges()) w[e] = b(gen);
  return w;
}

Point midpoint(const LatticeDomain& d, EdgeIndex e) {
  const auto info = d.edge_info(e);
  const Point p = d.site_position(info.first);
  return {(p.x + info.outer.x) / 2, (p.y + info.outer.y) / 2};
}

}  // namespace

TEST_SUITE("loops") {
  TEST_CASE("single site") {
    const auto d = build_domain(1.0, {0, 0, 0, 0});
    const auto loops = trace_loops(d, BondConfig::all_closed(d));
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].length() == 4);
    CHECK(loops[0].signed_area() == doctest::Approx(0.5));
    CHECK(loops[0].outer());
  }

  TEST_CASE("two sites joined") {
    const auto d = build_domain(1.0, {0, 0, 1, 0});
    auto w = BondConfig::all_closed(d);
    w[d.edge(0, Dir::East)] = 1;
    const auto loops = trace_loops(d, w);
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].length() == medial_edge_count(d));
    CHECK(loops[0].outer());
    CHECK(loops[0].signed_area() == doctest::Approx(1.0));
  }

  TEST_CASE("empty 2x2 block") {
    const auto d = build_domain(1.0, {0, 0, 1, 1});
    const auto w = BondConfig::all_closed(d);
    const auto loops = trace_loops(d, w);
    CHECK(loops.size() == 4);
    for (const auto& l : loops) CHECK(l.length() == 4);
    CHECK(count_dual_clusters(d, w) == 1);
  }

  TEST_CASE("ring with a hole has an inner clockwise loop") {
    const auto d = build_domain(1.0, {0, 0, 2, 2});
    auto w = BondConfig::all_closed(d);
    const SiteIndex ring[] = {0, 1, 2, 5, 8, 7, 6, 3};
    for (int i = 0; i < 8; ++i) {
      const SiteIndex s = ring[i], t = ring[(i + 1) % 8];
      for (Dir dir : kAllDirs)
        if (d.neighbor_site(s, dir) == t) w[d.edge(s, dir)] = 1;
    }
    const auto loops = trace_loops(d, w);
    int outer = 0, inner = 0;
    for (const auto& l : loops) (l.outer() ? outer : inner)++;
    CHECK(outer == 2);  // ring and the center singleton
    CHECK(inner == 1);
    CHECK(loops.size() == 3);
  }

  TEST_CASE("medial partition and Euler relation on random configurations") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 300; ++trial) {
      const int nx = 1 + static_cast<int>(gen() % 20), ny = 1 + static_cast<int>(gen() % 20);
      const auto d = build_domain(1.0, {0, 0, double(nx - 1), double(ny - 1)});
      const auto w = random_free(d, gen, (gen() % 100) / 100.0);
      const auto loops = trace_loops(d, w);
      std::size_t total = 0;
      std::map<std::pair<long, long>, int> used;
      for (const auto& l : loops) {
        total += l.length();
        for (std::size_t i = 0; i < l.length(); ++i) {
          const Point a = l.vertices[i], b = l.vertices[(i + 1) % l.length()];
          CHECK(std::fabs(std::fabs(a.x - b.x) - 0.5) < 1e-12);
          CHECK(std::fabs(std::fabs(a.y - b.y) - 0.5) < 1e-12);
          used[{std::lround(4 * (a.x + b.x)), std::lround(4 * (a.y + b.y))}]++;
        }
      }
      CHECK(total == medial_edge_count(d));
      for (const auto& [k, v] : used) CHECK(v == 1);
      const auto clusters = find_clusters(d, w, BoundaryCondition::Free).num_clusters();
      CHECK(loops.size() == clusters + count_dual_clusters(d, w) - 1);
    }
  }

  TEST_CASE("wired configurations are rejected") {
    const auto d = build_domain(1.0, {0, 0, 1, 1});
    auto w = BondConfig::all_closed(d);
    w[d.external_edges()[2]] = 1;
    CHECK_THROWS_AS(trace_loops(d, w), Error);
  }

  TEST_CASE("wired dual crosses every primal edge once") {
    std::mt19937_64 gen(5);
    const auto d = build_domain(0.5, {0, 0, 2, 1.5});
    BondConfig w(d.num_edges());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = gen() % 2;
    const auto dual = wired_dual(d, w);
    CHECK(dual.domain.nx() == d.nx() + 1);
    CHECK(dual.domain.ny() == d.ny() + 1);
    CHECK(dual.domain.internal_edges().size() == d.num_edges());
    for (auto e : dual.domain.external_edges()) CHECK_FALSE(dual.omega.open(e));
    std::map<std::pair<long, long>, EdgeIndex> primal;
    for (EdgeIndex e = 0; e < static_cast<EdgeIndex>(d.num_edges()); ++e) {
      const Point m = midpoint(d, e);
      primal[{std::lround(4 * m.x), std::lround(4 * m.y)}] = e;
    }
    for (auto e : dual.domain.internal_edges()) {
      const Point m = midpoint(dual.domain, e);
      const auto it = primal.find({std::lround(4 * (m.x + dual.offset.x)), std::lround(4 * (m.y + dual.offset.y))});
      REQUIRE(it != primal.end());
      CHECK(dual.omega.open(e) == !w.open(it->second));
    }
    // Planar Euler: dual clusters of the dual are the wired clusters.
    const auto primal_clusters = find_clusters(d, w, BoundaryCondition::PlusWired);
    const std::size_t wired_components = primal_clusters.num_internal() + 1;
    CHECK(count_dual_clusters(dual.domain, dual.omega) == wired_components);
  }

  TEST_CASE("loop export") {
    const auto d = build_domain(1.0, {0, 0, 1, 0});
    const auto text = export_loops(trace_loops(d, BondConfig::all_closed(d)));
    CHECK(text.find("\"loop_id\":1") != std::string::npos);
    CHECK(text.find("\"vertices\":[[") != std::string::npos);
  }
}
