#include <cmath>

#include "doctest.h"
#include "fkising/clusters.hpp"
#include "fkising/error.hpp"
#include "fkising/exact.hpp"
#include "fkising/weights.hpp"

using namespace fkising;

namespace {

SimParams make(double beta, double h) {
  SimParams p;
  p.beta = beta;
  p.h = h;
  return p;
}

int sp(std::uint64_t bits, int i) { return (bits >> i) & 1 ? 1 : -1; }

}  // namespace

TEST_SUITE("exact") {
  TEST_CASE("ising examples") {
    const auto two = build_domain(1.0, {0, 0, 1, 0});
    const double beta = 0.37;
    const auto d2 = enumerate_ising(two, make(beta, 0), BoundaryCondition::Free);
    CHECK(d2.expectation([](std::uint64_t b) { return double(sp(b, 0) * sp(b, 1)); }) ==
          doctest::Approx(std::tanh(beta)).epsilon(1e-13));

    const auto one = build_domain(1.0, {0, 0, 0, 0});
    const auto d1 = enumerate_ising(one, make(beta, 0.8), BoundaryCondition::Free);
    CHECK(d1.expectation([](std::uint64_t b) { return double(sp(b, 0)); }) ==
          doctest::Approx(std::tanh(beta * 0.8)).epsilon(1e-13));

    const auto sq = build_domain(1.0, {0, 0, 1, 1});
    const auto u = enumerate_ising(sq, make(0, 0), BoundaryCondition::Free);
    for (double q : u.prob) CHECK(q == doctest::Approx(1.0 / 16).epsilon(1e-14));

    double total = 0.0;
    for (double q : enumerate_ising(sq, make(0.4, 0.3), BoundaryCondition::PlusWired).prob) total += q;
    CHECK(std::fabs(total - 1.0) < 1e-12);
  }

  TEST_CASE("fk examples") {
    const auto two = build_domain(1.0, {0, 0, 1, 0});  // 7 edges, 1 internal
    const auto params = make(0.3, 0);
    const auto off = enumerate_fk(two, params, BoundaryCondition::Free, false);
    const auto on = enumerate_fk(two, params, BoundaryCondition::Free, true);
    for (std::size_t i = 0; i < off.prob.size(); ++i) CHECK(off.prob[i] == on.prob[i]);
    const double p = params.p();
    const EdgeIndex e = two.internal_edges()[0];
    const double open = off.expectation([e](std::uint64_t b) { return double((b >> e) & 1); });
    CHECK(open == doctest::Approx(2 * p / (2 * p + 4 * (1 - p))).epsilon(1e-13));

    const auto sure = enumerate_fk(two, make(1000.0, 0), BoundaryCondition::Free, false);
    std::uint64_t all = 1ull << e;
    CHECK(sure.prob[all] == doctest::Approx(1.0));
  }

  TEST_CASE("joint distribution and marginal identities") {
    const auto d = build_domain(1.0, {0, 0, 1, 1});
    for (auto bc : {BoundaryCondition::Free, BoundaryCondition::PlusWired}) {
      const auto params = make(0.4, 0.3);
      const auto joint = enumerate_joint(d, params, bc);
      double total = 0.0;
      for (double q : joint.prob) total += q;
      CHECK(std::fabs(total - 1.0) < 1e-12);
      for (std::size_t i = 0; i < joint.prob.size(); ++i) {
        const auto sigma = spins_from_bits(d, i & 15u);
        const auto omega = bonds_from_bits(d, i >> 4);
        if (!compatible(d, sigma, omega, bc)) CHECK(joint.prob[i] == 0.0);
      }
      const auto sm = spin_marginal(joint);
      const auto ising = enumerate_ising(d, params, bc);
      for (std::size_t i = 0; i < sm.prob.size(); ++i) CHECK(std::fabs(sm.prob[i] - ising.prob[i]) < 1e-10);
      const auto bm = bond_marginal(joint);
      const auto fk = enumerate_fk(d, params, bc, true);
      for (std::size_t i = 0; i < bm.prob.size(); ++i) CHECK(std::fabs(bm.prob[i] - fk.prob[i]) < 1e-10);
    }
  }

  TEST_CASE("conditional sign law") {
    const auto d = build_domain(1.0, {0, 0, 1, 0});
    auto w = BondConfig::all_closed(d);
    for (double q : exact_conditional_eta(d, w, make(0.5, 0), BoundaryCondition::Free)) CHECK(q == doctest::Approx(0.5));
    w[d.internal_edges()[0]] = 1;
    const auto eta = exact_conditional_eta(d, w, make(1.0, std::log(3.0) / 4), BoundaryCondition::Free);
    REQUIRE(eta.size() == 1);
    CHECK(eta[0] == doctest::Approx(0.75).epsilon(1e-13));
    auto wb = BondConfig::all_closed(d);
    wb[d.external_edges()[0]] = 1;
    const auto c = find_clusters(d, wb, BoundaryCondition::PlusWired);
    const auto eb = exact_conditional_eta(d, wb, make(0.5, 0.2), BoundaryCondition::PlusWired);
    CHECK(eb[c.boundary] == 1.0);
  }

  TEST_CASE("partition function identity, connectivity and expectation transfer") {
    for (auto rect : {Rect{0, 0, 0, 0}, Rect{0, 0, 1, 0}, Rect{0, 0, 1, 1}}) {
      const auto d = build_domain(1.0, rect);
      for (auto bc : {BoundaryCondition::Free, BoundaryCondition::PlusWired}) {
        const double beta = 0.45, H = 0.35;
        const auto z_h = enumerate_ising(d, make(beta, H), bc);
        const auto z_0 = enumerate_ising(d, make(beta, 0), bc);
        const auto fk0 = enumerate_fk(d, make(beta, 0), bc, false);
        const double tilt = fk0.expectation([&](std::uint64_t b) {
          return std::exp(field_log_tilt(find_clusters(d, bonds_from_bits(d, b), bc), beta * H));
        });
        const double lhs = std::exp(static_cast<double>(z_h.log_z - z_0.log_z));
        CHECK(std::fabs(lhs / tilt - 1.0) < 1e-10);

        if (bc == BoundaryCondition::Free && d.num_sites() > 1) {
          const int y = static_cast<int>(d.num_sites()) - 1;
          const double corr = z_0.expectation([&](std::uint64_t b) { return double(sp(b, 0) * sp(b, y)); });
          const double conn = fk0.expectation([&](std::uint64_t b) {
            const auto c = find_clusters(d, bonds_from_bits(d, b), bc);
            return c.cluster_of[0] == c.cluster_of[y] ? 1.0 : 0.0;
          });
          CHECK(std::fabs(corr - conn) < 1e-12);
          // E_H(g) = E_0(g e^{beta H M}) / E_0(e^{beta H M}) for g = sigma_0 sigma_y.
          const auto tilt_m = [&](std::uint64_t b) {
            double m = 0;
            for (int i = 0; i < static_cast<int>(d.num_sites()); ++i) m += sp(b, i);
            return std::exp(beta * H * m);
          };
          const double num = z_0.expectation([&](std::uint64_t b) { return sp(b, 0) * sp(b, y) * tilt_m(b); });
          const double den = z_0.expectation(tilt_m);
          CHECK(std::fabs(num / den - z_h.expectation([&](std::uint64_t b) { return double(sp(b, 0) * sp(b, y)); })) <
                1e-12);
        }
      }
    }
  }

  TEST_CASE("size limits and export") {
    const auto big = build_domain(1.0, {0, 0, 3, 3});
    CHECK_THROWS_AS(enumerate_ising(big, make(0.4, 0), BoundaryCondition::Free), Error);
    CHECK_THROWS_AS(enumerate_fk(build_domain(1.0, {0, 0, 2, 1}), make(0.4, 0), BoundaryCondition::Free, false), Error);
    const auto d = build_domain(1.0, {0, 0, 1, 0});
    const auto dist = enumerate_ising(d, make(0.4, 0.1), BoundaryCondition::Free);
    const auto text = export_oracle(d, make(0.4, 0.1), BoundaryCondition::Free, dist);
    CHECK(text.find("\"Z\"") != std::string::npos);
    CHECK(text.find("\"observables\"") != std::string::npos);
  }
}
