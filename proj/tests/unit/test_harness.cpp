#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fkising/error.hpp"
#include "fkising/exact.hpp"
#include "fkising/harness.hpp"
#include "fkising/spectral.hpp"

using namespace fkising;

namespace {

int sp(std::uint64_t bits, int i) { return (bits >> i) & 1 ? 1 : -1; }

SimParams crit(double a, double h, std::int64_t sweeps, std::uint64_t seed) {
  SimParams p;
  p.a = a;
  p.h = h;
  p.sweeps = sweeps;
  p.burn_in = 50;
  p.seed = seed;
  return p;
}

// Exact value of the window-averaged truncated correlation estimated by truncated_2pt.
double exact_window_truncated(const LatticeDomain& d, const ExactDistribution& dist, const PairRegion& g, int r) {
  const auto [wx, wy] = pair_windows(g, r);
  auto mean_spin = [&](int x, int y) {
    const int s = d.site_at(x, y);
    return dist.expectation([s](std::uint64_t b) { return double(sp(b, s)); });
  };
  auto corr = [&](int s, int t) { return dist.expectation([s, t](std::uint64_t b) { return double(sp(b, s) * sp(b, t)); }); };
  auto window_mean = [&](const kernels::Window& w, int dx, int dy) {
    double acc = 0.0;
    for (int y = w.y_lo; y <= w.y_hi; ++y)
      for (int x = w.x_lo; x <= w.x_hi; ++x) acc += mean_spin(x + dx, y + dy);
    return acc / w.count();
  };
  double a = 0.0;
  for (int y = wx.y_lo; y <= wx.y_hi; ++y)
    for (int x = wx.x_lo; x <= wx.x_hi; ++x) a += corr(d.site_at(x, y), d.site_at(x + r, y));
  for (int y = wy.y_lo; y <= wy.y_hi; ++y)
    for (int x = wy.x_lo; x <= wy.x_hi; ++x) a += corr(d.site_at(x, y), d.site_at(x, y + r));
  a /= wx.count() + wy.count();
  return a - 0.5 * (window_mean(wx, 0, 0) * window_mean(wx, r, 0) + window_mean(wy, 0, 0) * window_mean(wy, 0, r));
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("run_chains is reproducible and independent of the thread count") {
    RunSpec spec;
    spec.domain = build_box(1.0 / 8, 8);
    spec.params = crit(1.0 / 8, 0.5, 30, 77);
    spec.params.thin = 3;
    spec.chains = 3;
    const auto a = run_chains(spec, {});
    CHECK(a.size() == 30);
    CHECK(a.front().chain_id == 0);
    CHECK(a.back().chain_id == 2);
    CHECK(a.front().sweep == 50 + 3);
    const auto b = run_chains(spec, {});
    CHECK(a == b);
    // Replay through the JSON line format.
    std::string text;
    for (const auto& r : a) text += to_json_line(r) + "\n";
    CHECK(parse_records(text) == a);
    spec.chains = 0;
    CHECK_THROWS_AS(run_chains(spec, {}), Error);
  }

  TEST_CASE("truncated correlations match the oracle on small boxes") {
    const double beta = 0.4, h = 0.3;
    for (int L : {1, 2}) {
      TruncatedRun run;
      run.L = L;
      run.a = 1.0;
      run.h = h;
      run.beta = beta;
      run.r_list = L == 1 ? std::vector<int>{1} : std::vector<int>{1, 2};
      run.sweeps = 60000;
      run.burn_in = 100;
      run.seed = 41 + L;
      const auto est = truncated_2pt(run);
      const auto d = build_box(1.0, L);
      SimParams p;
      p.beta = beta;
      p.h = h;
      const auto dist = enumerate_ising(d, p, BoundaryCondition::PlusWired);
      const PairRegion g{L / 4, L - L / 4, L / 4, L - L / 4, false};
      for (const auto& e : est) {
        const double exact = exact_window_truncated(d, dist, g, e.r);
        INFO("L=" << L << " r=" << e.r << " est=" << e.value << " se=" << e.se << " exact=" << exact);
        CHECK(std::fabs(e.value - exact) < 4.0 * e.se + 1e-3);
        CHECK(e.se < 0.01);
      }
    }
  }

  TEST_CASE("field covariances match the oracle") {
    CovarianceRun run;
    run.L = 3;
    run.a = 1.0;
    run.h = 0.3;
    run.f = {0, 0, 0, 3};
    run.g = {0, 0, 0, 3};
    run.u_list = {1, 2, 3};
    run.sweeps = 40000;
    run.burn_in = 100;
    run.seed = 5;
    const auto out = covariance_decay_field(run);
    const auto d = build_box(1.0, 3);
    SimParams p;
    p.h = 0.3;
    const auto dist = enumerate_ising(d, p, BoundaryCondition::PlusWired, ExactLimits{16, 12, 20});
    auto col_sum = [&](std::uint64_t b, int c) {
      double s = 0;
      for (int y = 0; y < 4; ++y) s += sp(b, d.site_at(c, y));
      return s;
    };
    const double mf = dist.expectation([&](std::uint64_t b) { return col_sum(b, 0); });
    for (std::size_t i = 0; i < run.u_list.size(); ++i) {
      const int c = static_cast<int>(run.u_list[i]);
      const double mg = dist.expectation([&](std::uint64_t b) { return col_sum(b, c); });
      const double fg = dist.expectation([&](std::uint64_t b) { return col_sum(b, 0) * col_sum(b, c); });
      const double exact = fg - mf * mg;  // Theta_1 = 1
      INFO("u=" << c << " est=" << out.rows[i].cov << " se=" << out.rows[i].se << " exact=" << exact);
      CHECK(std::fabs(out.rows[i].cov - exact) < 4.0 * out.rows[i].se + 1e-3);
    }
    run.u_list = {0, 1, 2};
    run.f = {0, 0, 1, 3};
    run.g = {0, 0, 1, 3};
    CHECK_THROWS_AS(covariance_decay_field(run), Error);
  }

  TEST_CASE("second moments agree at H = 0") {
    auto rows = second_moment_normalization({{0.25}, 4000, 100, 13, 1});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].z_score < 4.0);
    CHECK(rows[0].spin.value > 0.0);
    CHECK(normalization_csv(rows).rfind("a,spin,spin_se,fk,fk_se", 0) == 0);
  }

  TEST_CASE("two-point fit on synthetic power laws") {
    const std::vector<int> r_list{2, 4, 8, 16};
    std::mt19937 rng(3);
    std::normal_distribution<double> g(0.0, 0.01);
    std::vector<Record> recs(400);
    for (auto& rec : recs)
      for (int r : r_list) {
        const double v = std::pow(r, -0.25) * (1.0 + g(rng));
        rec.obs.push_back(v);
        rec.obs.push_back(v);
      }
    const auto res = two_point_from_records(recs, r_list);
    CHECK(res.fit.slope == doctest::Approx(-0.25).epsilon(0.02));
    CHECK(res.fit.slope_se < 0.01);
    for (auto& rec : recs) rec.obs[0] = -1.0;
    CHECK_THROWS_AS(two_point_from_records(recs, r_list), Error);
  }

  TEST_CASE("mass extraction on synthetic correlations") {
    const auto r_list = default_tail_r_list(60);
    CHECK(r_list[15] == 16);
    CHECK(r_list[16] == 18);
    CHECK(r_list.back() == 60);
    const double m = 0.1, a = 1.0 / 64;
    std::mt19937 rng(8);
    std::normal_distribution<double> g(0.0, 0.01);
    auto make = [&](double rate) {
      std::vector<Record> recs(200);
      for (auto& rec : recs)
        for (int r : r_list) {
          rec.obs.push_back(std::pow(r, -0.25) * std::exp(-rate * r) * (1.0 + g(rng)));
          for (int k = 0; k < 4; ++k) rec.obs.push_back(0.0);
        }
      return recs;
    };
    const auto est = mass_from_records(make(m), r_list, 1.0, a);
    CHECK(est.mass * a == doctest::Approx(m).epsilon(0.01));
    CHECK(est.window_lo == doctest::Approx(1 / m).epsilon(0.05));
    CHECK(est.points >= 3);
    CHECK_THROWS_AS(mass_from_records(make(0.02), r_list, 1.0, a), Error);

    std::vector<MassEstimate> per_h;
    for (double h : {0.5, 1.0, 2.0, 4.0}) per_h.push_back({h, 3.0 * std::pow(h, 8.0 / 15.0), 0.01, 0, 0, 5});
    CHECK(fit_mass_from(per_h).fit.slope == doctest::Approx(8.0 / 15.0).epsilon(1e-9));
    per_h.resize(2);
    CHECK_THROWS_AS(fit_mass_from(per_h), Error);
  }

  TEST_CASE("scaling test at lambda = 1 compares equal laws") {
    ScalingRun run;
    run.L = 8;
    run.a = 1.0 / 8;
    run.h = 1.0;
    run.lambda = 1.0;
    run.samples = 2000;
    run.thin = 1;
    run.burn_in = 50;
    run.seed = 3;
    const auto res = scaling_covariance_test(run);
    CHECK(res.base.size() == 2000);
    CHECK(res.h_scaled == res.h_base);
    CHECK(res.ks.p_value > 0.001);
    run.lambda = 2.5;
    run.L = 3;
    CHECK_THROWS_AS(scaling_covariance_test(run), Error);
    run.lambda = -1;
    CHECK_THROWS_AS(scaling_covariance_test(run), Error);
  }

  TEST_CASE("loop summary and free/wired runs") {
    const auto d = build_box(0.25, 2);
    const auto closed = BondConfig::all_closed(d);
    const auto s = loop_summary(d, closed, 0.5);
    CHECK(s.largest_cluster_diameter == 0.0);
    CHECK(s.largest_loop_diameter == doctest::Approx(0.25));
    CHECK(s.big_loops == 9.0);

    FreeWiredRun run;
    run.L = 8;
    run.a = 1.0 / 8;
    run.samples = 300;
    run.burn_in = 20;
    run.seed = 4;
    const auto res = free_vs_wired_loops(run);
    CHECK(res.free_side.size() == 300);
    CHECK(res.wired_side.size() == 300);
    CHECK(res.loop_diameter.n1 == 300);
    CHECK(free_wired_csv(res).size() > 0);
    run.L = 1;
    CHECK_THROWS_AS(free_vs_wired_loops(run), Error);
  }

  TEST_CASE("cutoff Cauchy run and the Sobolev bound chain") {
    CauchyRun run;
    run.L = 16;
    run.a = 1.0 / 16;
    run.epsilons = {0.5, 0.25, 0.125};
    run.modes = 17;
    run.samples = 200;
    run.burn_in = 20;
    run.seed = 6;
    const auto res = cutoff_cauchy_run(run);
    CHECK(res.diag.rows.size() == 2);
    CHECK(std::isfinite(res.max_tail_ratio));

    // E ||Phi||^2_{H^-alpha'} <= (sum_i ||u_i||^2_inf / lambda_i^alpha') E[Phi(I_D)^2], alpha' = 7/4.
    const double alpha = 1.75, a = 1.0 / 16;
    RunSpec spec;
    spec.domain = build_box(a, 16);
    spec.params = crit(a, 0.0, 1000, 12);
    std::vector<double> lhs, m2;
    const Rect rect = spec.domain.region();
    auto factory = [&]() -> Observer {
      return [&](const Chain& chain, Record& rec) {
        std::vector<double> w(chain.spins().size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = theta(a) * chain.spins()[i];
        const auto c = lattice_coefficients(chain.domain(), w, rect, 17, 17);
        lhs.push_back(weighted_square_sum(c, alpha));
        m2.push_back(rec.rescaled_mag * rec.rescaled_mag);
      };
    };
    run_chains(spec, factory);
    const auto basis = eigen_pairs(rect, 289);
    double series = 0.0;
    for (const auto& e : basis) series += std::pow(e.sup_norm(), 2) * std::pow(e.lambda, -alpha);
    series += 4.0 / rect.area() * eigen_tail_sum_bound(rect.area(), basis.back().lambda, alpha);
    const auto l = mean_se(lhs), r = mean_se(m2);
    CHECK(l.value <= series * r.value + 3.0 * std::hypot(l.se, series * r.se));
  }

  TEST_CASE("mesh diagnostic runs on coarse meshes") {
    MeshDiagnosticRun run;
    run.a = 1.0 / 16;
    run.epsilon = 0.25;
    run.burn_in = 20;
    run.seed = 2;
    const auto row = mesh_diagnostic(run);
    CHECK(row.a_half == doctest::Approx(1.0 / 32));
    CHECK(row.d_cl >= 0.0);
    CHECK(row.d_meas >= 0.0);
    CHECK(row.d_le >= 0.0);
    CHECK(row.n_clusters_large >= 2);
  }

  TEST_CASE("summary json") {
    const auto j = summary_json({{"exponent-2pt", -0.25, -0.24, 0.01, true}});
    CHECK(j.find("\"test_name\"") != std::string::npos);
    CHECK(j.find("\"stderr\"") != std::string::npos);
    CHECK(j.find("\"pass\"") != std::string::npos);
  }
}
