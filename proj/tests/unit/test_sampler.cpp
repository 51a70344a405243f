#include <cmath>
#include <random>

#include "doctest.h"
#include "fkising/error.hpp"
#include "fkising/exact.hpp"
#include "fkising/sampler.hpp"
#include "fkising/weights.hpp"

using namespace fkising;

namespace {

SimParams make(double beta, double h, double a = 1.0) {
  SimParams p;
  p.beta = beta;
  p.h = h;
  p.a = a;
  return p;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("params") {
    CHECK(kBetaCritical == doctest::Approx(0.4406867935097715).epsilon(1e-15));
    CHECK(make(kBetaCritical, 0).p() == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-15));
    CHECK(make(0.4, 2.0, 0.5).lattice_field() == doctest::Approx(2.0 * std::pow(0.5, 15.0 / 8)));
    CHECK_THROWS_AS(make(-0.1, 0).validate(), Error);
    CHECK_THROWS_AS(make(0.4, -1).validate(), Error);
    CHECK_THROWS_AS(make(0.4, 0, 0).validate(), Error);
    auto p = make(0.4, 0);
    p.thin = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    // H = h a^{15/8} must not exceed a^{-15/8}.
    CHECK_NOTHROW(make(0.4, std::pow(0.5, -3.75), 0.5).validate());
    CHECK_THROWS_AS(make(0.4, 1.01 * std::pow(0.5, -3.75), 0.5).validate(), Error);
    CHECK(log_cosh(0.0) == 0.0);
    CHECK(log_cosh(1000.0) == doctest::Approx(1000.0 - std::log(2.0)));
    CHECK(log_cosh(std::log(3.0)) == doctest::Approx(std::log(5.0 / 3.0)));
  }

  TEST_CASE("gibbs_log_weight") {
    const auto two = build_domain(1.0, {0, 0, 1, 0});
    const double beta = 0.4, H = 0.3;
    SpinConfig s(2, 1);
    CHECK(gibbs_log_weight(two, s, make(beta, H), BoundaryCondition::Free) == doctest::Approx(beta + 2 * beta * H));
    s[1] = -1;
    CHECK(gibbs_log_weight(two, s, make(beta, 0), BoundaryCondition::Free) == doctest::Approx(-beta));
    const auto one = build_domain(1.0, {0, 0, 0, 0});
    CHECK(gibbs_log_weight(one, SpinConfig(1, 1), make(beta, 0), BoundaryCondition::PlusWired) ==
          doctest::Approx(4 * beta));
  }

  TEST_CASE("rc_log_weight and field_fk_log_weight") {
    const auto two = build_domain(1.0, {0, 0, 1, 0});
    const double p = 0.37;
    auto w = BondConfig::all_closed(two);
    const EdgeIndex e = two.internal_edges()[0];
    w[e] = 1;
    CHECK(rc_log_weight(two, w, p, BoundaryCondition::Free) == doctest::Approx(std::log(p) + std::log(2.0)));
    w[e] = 0;
    CHECK(rc_log_weight(two, w, p, BoundaryCondition::Free) == doctest::Approx(std::log(1 - p) + 2 * std::log(2.0)));

    const auto d = build_domain(1.0, {0, 0, 2, 1});
    CHECK(rc_log_weight(d, BondConfig::all_closed(d), p, BoundaryCondition::Free) ==
          doctest::Approx(6 * std::log(2.0) + d.num_internal_edges() * std::log(1 - p)));

    auto bad = BondConfig::all_closed(two);
    bad[two.external_edges()[0]] = 1;
    CHECK_THROWS_AS(rc_log_weight(two, bad, p, BoundaryCondition::Free), Error);

    // H = 0 reduces to rc weight.
    const auto params0 = make(0.4, 0.0);
    w[e] = 1;
    CHECK(field_fk_log_weight(two, w, params0, BoundaryCondition::Free) ==
          doctest::Approx(rc_log_weight(two, w, params0.p(), BoundaryCondition::Free)));
    // 2 beta H = ln 3.
    const double beta = 1.0;
    const auto params = make(beta, std::log(3.0) / 2.0);
    CHECK(field_fk_log_weight(two, w, params, BoundaryCondition::Free) ==
          doctest::Approx(rc_log_weight(two, w, params.p(), BoundaryCondition::Free) + std::log(5.0 / 3.0)));
    // Single site wired with an open external edge: the site is the boundary cluster.
    const auto one = build_domain(1.0, {0, 0, 0, 0});
    auto wo = BondConfig::all_closed(one);
    wo[one.external_edges()[0]] = 1;
    const auto pw = make(0.5, 0.7);
    CHECK(field_fk_log_weight(one, wo, pw, BoundaryCondition::PlusWired) ==
          doctest::Approx(rc_log_weight(one, wo, pw.p(), BoundaryCondition::PlusWired) + pw.beta_h()));
  }

  TEST_CASE("bonds given spins limits") {
    const auto d = build_domain(1.0, {0, 0, 3, 3});
    const CounterRng rng(1, 0);
    std::mt19937_64 gen(1);
    SpinConfig s(d.num_sites());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = gen() % 2 ? 1 : -1;
    const auto w0 = sample_bonds_given_spins(d, s, make(0.0, 0), BoundaryCondition::PlusWired, rng, 0);
    for (std::size_t e = 0; e < w0.size(); ++e) CHECK(w0[e] == 0);
    const auto w1 = sample_bonds_given_spins(d, s, make(50.0, 0), BoundaryCondition::PlusWired, rng, 0);
    for (EdgeIndex e = 0; e < static_cast<EdgeIndex>(d.num_edges()); ++e) {
      const auto info = d.edge_info(e);
      CHECK(w1.open(e) == (s[info.first] == far_spin(s, info)));
    }
    CHECK(compatible(d, s, w1, BoundaryCondition::PlusWired));
  }

  TEST_CASE("spins given bonds sign law") {
    const auto d = build_domain(1.0, {0, 0, 1, 0});
    const CounterRng rng(2, 0);
    auto w = BondConfig::all_closed(d);
    w[d.internal_edges()[0]] = 1;  // one cluster of two sites
    for (auto [beta_h, expect] : {std::pair{0.0, 0.5}, std::pair{std::log(3.0) / 4.0, 0.75}}) {
      const auto params = make(1.0, beta_h);
      const int n = 100000;
      int plus = 0;
      for (int step = 0; step < n; ++step) {
        const auto s = sample_spins_given_bonds(d, w, params, BoundaryCondition::Free, rng, step);
        CHECK(s[0] == s[1]);
        plus += s[0] == 1;
      }
      CHECK(std::fabs(plus / double(n) - expect) < 4 * std::sqrt(expect * (1 - expect) / n));
    }
    // Huge field: every cluster plus.
    const auto params = make(1.0, 500.0);
    for (int step = 0; step < 100; ++step) CHECK(sample_spins_given_bonds(d, w, params, BoundaryCondition::Free, rng, step)[0] == 1);
    // Boundary cluster is always plus.
    auto wb = BondConfig::all_closed(d);
    wb[d.external_edges()[0]] = 1;
    for (int step = 0; step < 200; ++step) {
      const auto s = sample_spins_given_bonds(d, wb, make(0.3, 0), BoundaryCondition::PlusWired, rng, step);
      CHECK(s[d.edge_info(d.external_edges()[0]).first] == 1);
    }
  }

  TEST_CASE("sw step") {
    const auto d = build_domain(1.0, {0, 0, 1, 1});
    const CounterRng rng(3, 0);
    ChainState st{SpinConfig::all_plus(d), BondConfig::all_closed(d)};
    st.sigma[0] = -1;
    st.omega[d.edge(0, Dir::East)] = 1;
    CHECK_THROWS_AS(sw_field_step(d, st, make(0.4, 0), BoundaryCondition::Free, rng, 0), Error);
    st.omega = BondConfig::all_closed(d);
    for (int step = 0; step < 50; ++step) {
      st = sw_field_step(d, st, make(0.4, 0.3), BoundaryCondition::Free, rng, step);
      CHECK(compatible(d, st.sigma, st.omega, BoundaryCondition::Free));
    }
    // beta = 0: spins i.i.d. with P(+) = e^{beta H}/(2 cosh beta H) = 1/2.
    int plus = 0;
    const int n = 20000;
    for (int step = 0; step < n; ++step) {
      st = sw_field_step(d, st, make(0.0, 0.0), BoundaryCondition::Free, rng, step);
      plus += st.sigma[2] == 1;
    }
    CHECK(std::fabs(plus / double(n) - 0.5) < 4 * std::sqrt(0.25 / n));
  }

  TEST_CASE("magnetization") {
    CHECK(magnetization(SpinConfig(9, 1), 1.0).bare == 9);
    CHECK(magnetization(SpinConfig(9, 1), 1.0).rescaled == 9.0);
    CHECK(magnetization(SpinConfig(16, 1), 0.5).rescaled == doctest::Approx(4.36203).epsilon(1e-5));
  }

  TEST_CASE("chains are reproducible and records round-trip") {
    auto p = make(kBetaCritical, 0.5, 1.0 / 8);
    p.seed = 99;
    p.chain_id = 4;
    Chain c1(build_box(p.a, 8), p, BoundaryCondition::PlusWired), c2(build_box(p.a, 8), p, BoundaryCondition::PlusWired);
    for (int i = 0; i < 30; ++i) {
      c1.sweep();
      c2.sweep();
    }
    CHECK(c1.spins() == c2.spins());
    CHECK(c1.bonds() == c2.bonds());
    auto r = c1.record();
    r.obs = {0.25, -1.5};
    CHECK(parse_record(to_json_line(r)) == r);
    CHECK(r.sweep == 30);
    CHECK(r.boundary_cluster_size > 0);
    CHECK_THROWS_AS(parse_record("{\"chain_id\":1}"), Error);
    std::vector<Record> recs{r, r};
    recs[0].sweep = 40;
    sort_records(recs);
    CHECK(recs[0].sweep == 30);
  }

  TEST_CASE("reweighting to a field") {
    const auto d = build_domain(1.0, {0, 0, 1, 1});
    std::vector<ReweightSample> plain;
    plain.push_back({{1, 1}, 0, 2.0});
    plain.push_back({{2}, 0, 4.0});
    CHECK(reweight_to_field(plain, make(0.4, 0.0), 1.0).estimate == doctest::Approx(3.0));
    plain[0].value = plain[1].value = 1.0;
    CHECK(reweight_to_field(plain, make(0.4, 0.7), 1.0).estimate == doctest::Approx(1.0));
    CHECK_THROWS_AS(reweight_to_field(plain, make(0.4, 0.0), 100.0), Error);

    // Zero-field chain reweighted to H = 0.1 against the exact <sigma_0>.
    auto p0 = make(0.4, 0.0);
    p0.seed = 5;
    Chain chain(d, p0, BoundaryCondition::Free);
    const auto target = make(0.4, 0.1);
    std::vector<ReweightSample> samples;
    std::vector<double> vals;
    for (int i = 0; i < 60000; ++i) {
      chain.sweep();
      const auto decomp = chain.decomposition();
      const double v = std::tanh(target.beta_h() * decomp.sizes[decomp.cluster_of[0]]);
      samples.push_back(ReweightSample::from(decomp, v));
    }
    const auto est = reweight_to_field(samples, target);
    const auto exact = enumerate_ising(d, target, BoundaryCondition::Free);
    const double m0 = exact.expectation([](std::uint64_t bits) { return (bits & 1) ? 1.0 : -1.0; });
    // Block error of the ratio estimator.
    const int nb = 20, bs = static_cast<int>(samples.size()) / nb;
    std::vector<double> blocks;
    for (int b = 0; b < nb; ++b) {
      std::span<const ReweightSample> part(samples.data() + b * bs, bs);
      blocks.push_back(reweight_to_field(part, target, 1.0).estimate);
    }
    double mean = 0, ss = 0;
    for (double x : blocks) mean += x / nb;
    for (double x : blocks) ss += (x - mean) * (x - mean);
    const double se = std::sqrt(ss / (nb - 1) / nb);
    CHECK(std::fabs(est.estimate - m0) < 3 * se + 1e-4);
  }
}
