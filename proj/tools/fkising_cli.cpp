// fkising: command-line driver for the sampler and the scaling estimators.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "fkising/clusters.hpp"
#include "fkising/error.hpp"
#include "fkising/exact.hpp"
#include "fkising/harness.hpp"
#include "fkising/loops.hpp"
#include "fkising/run_config.hpp"
#include "fkising/sampler.hpp"
#include "fkising/spectral.hpp"

namespace fs = std::filesystem;
using namespace fkising;

namespace {

fs::path out_dir() {
  const char* env = std::getenv("FKISING_OUT_DIR");
  fs::path p = env && *env ? fs::path(env) : fs::path(".");
  fs::create_directories(p);
  return p;
}

void write_file(const std::string& name, const std::string& text) {
  const fs::path p = out_dir() / name;
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + p.string());
  out << text;
  std::cerr << "wrote " << p.string() << "\n";
}

int finish(const std::vector<SummaryEntry>& entries, const std::string& name) {
  write_file(name + "_summary.json", summary_json(entries));
  bool ok = true;
  for (const auto& e : entries) {
    std::cout << (e.pass ? "PASS " : "FAIL ") << e.test_name << " estimate=" << e.estimate << " stderr=" << e.stderr_
              << " target=" << e.target << "\n";
    ok = ok && e.pass;
  }
  return ok ? 0 : 1;
}

struct Overrides {
  std::string config;
  double beta = 0, h = 0, a = 0, lambda = 0, alpha = 0;
  int L = 0, chains = 0;
  std::string bc;
  std::int64_t sweeps = 0, burn_in = 0, thin = 0, samples = 0;
  std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FK-Ising cluster sampler and scaling estimators"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_flag("--help", "print this help");
  Overrides o;
  app.add_option("--config", o.config, "INI run configuration");
  auto* o_beta = app.add_option("--beta", o.beta, "inverse temperature");
  auto* o_h = app.add_option("--h", o.h, "continuum field h (H = h a^{15/8})");
  auto* o_a = app.add_option("--a", o.a, "mesh");
  auto* o_L = app.add_option("--L", o.L, "box side in lattice spacings");
  auto* o_bc = app.add_option("--bc", o.bc, "free | plus");
  auto* o_sweeps = app.add_option("--sweeps", o.sweeps, "recorded sweeps");
  auto* o_burn = app.add_option("--burn-in", o.burn_in, "burn-in sweeps");
  auto* o_seed = app.add_option("--seed", o.seed, "RNG seed");
  auto* o_chains = app.add_option("--chains", o.chains, "independent chains");
  auto* o_thin = app.add_option("--thin", o.thin, "record every thin-th sweep");
  auto* o_samples = app.add_option("--samples", o.samples, "samples per ensemble");
  auto* o_lambda = app.add_option("--lambda", o.lambda, "scale factor");
  auto* o_alpha = app.add_option("--alpha", o.alpha, "Sobolev exponent");

  auto* sample = app.add_subcommand("sample", "run chains and write records as JSON lines");
  auto* oracle = app.add_subcommand("oracle", "exact enumeration on a small box");
  auto* exponent = app.add_subcommand("exponent-2pt", "critical two-point decay exponent");
  auto* normalization = app.add_subcommand("normalization", "second moment of the block magnetization");
  auto* mass = app.add_subcommand("mass", "mass-gap exponent from truncated correlations");
  auto* scaling = app.add_subcommand("scaling-test", "scaling covariance KS test");
  auto* bc_test = app.add_subcommand("bc-test", "free vs wired loop statistics");
  auto* sobolev = app.add_subcommand("sobolev", "cutoff Cauchy diagnostic in H^{-alpha}");
  auto* loops = app.add_subcommand("loops", "trace medial loops of one sample");
  auto* metrics = app.add_subcommand("metrics", "mesh diagnostic between a and a/2");
  double eps = 0.25;
  metrics->add_option("--epsilon", eps, "diameter cutoff for large clusters");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (*o_beta) c.beta = o.beta;
    if (*o_h) c.h = o.h;
    if (*o_a) c.a = o.a;
    if (*o_L) c.L = o.L;
    if (*o_bc) c.bc = parse_boundary_condition(o.bc);
    if (*o_sweeps) c.sweeps = o.sweeps;
    if (*o_burn) c.burn_in = o.burn_in;
    if (*o_seed) c.seed = o.seed;
    if (*o_chains) c.chains = o.chains;
    if (*o_thin) c.thin = o.thin;
    if (*o_samples) c.samples = o.samples;
    if (*o_lambda) c.lambda = o.lambda;
    if (*o_alpha) c.alpha = o.alpha;

    if (*sample) {
      RunSpec spec;
      spec.domain = build_box(c.a, c.L);
      spec.bc = c.bc;
      spec.params = c.sim_params();
      spec.chains = c.chains;
      std::string text;
      for (const auto& r : run_chains(spec, {})) text += to_json_line(r) + "\n";
      write_file("records.jsonl", text);
      return 0;
    }
    if (*oracle) {
      const auto d = build_box(c.a, c.L);
      const auto p = c.sim_params();
      write_file("oracle.json", export_oracle(d, p, c.bc, enumerate_ising(d, p, c.bc)));
      return 0;
    }
    if (*exponent) {
      TwoPointRun run;
      run.L = c.L;
      run.a = c.a;
      run.r_list = c.r_list;
      run.sweeps = c.sweeps;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      run.chains = c.chains;
      run.beta = c.beta;
      const auto r = estimate_critical_2pt(run);
      write_file("exponent_2pt.csv", two_point_csv(r));
      return finish({{"critical_2pt_slope", -0.25, r.fit.slope, r.fit.slope_se,
                      std::fabs(r.fit.slope + 0.25) <= c.slope_tol}},
                    "exponent_2pt");
    }
    if (*normalization) {
      NormalizationRun run;
      run.a_list = c.a_list;
      run.sweeps = c.sweeps;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      run.chains = c.chains;
      const auto rows = second_moment_normalization(run);
      write_file("normalization.csv", normalization_csv(rows));
      double lo = rows.front().spin.value, hi = lo, zmax = 0.0;
      for (const auto& r : rows) {
        lo = std::min(lo, r.spin.value);
        hi = std::max(hi, r.spin.value);
        zmax = std::max(zmax, r.z_score);
      }
      return finish({{"normalization_spread", c.norm_spread, hi / lo - 1.0, 0.0, hi / lo - 1.0 < c.norm_spread},
                     {"spin_fk_agreement_z", c.z_max, zmax, 0.0, zmax <= c.z_max}},
                    "normalization");
    }
    if (*mass) {
      MassRun run;
      run.h_list = c.h_list;
      run.L = c.L;
      run.a = c.a;
      run.sweeps = c.sweeps;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      run.chains = c.chains;
      const auto fit = fit_mass(run);
      write_file("mass.csv", mass_csv(fit));
      return finish({{"mass_exponent", 8.0 / 15.0, fit.fit.slope, fit.fit.slope_se,
                      std::fabs(fit.fit.slope - 8.0 / 15.0) <= c.mass_tol}},
                    "mass");
    }
    if (*scaling) {
      ScalingRun run;
      run.L = c.L;
      run.a = c.a;
      run.h = c.h;
      run.lambda = c.lambda;
      run.bc = c.bc;
      run.samples = c.samples;
      run.thin = c.thin;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      const auto r = scaling_covariance_test(run);
      write_file("scaling.csv", scaling_csv(r));
      const double tol = c.h == 0.0 ? c.ks_max : c.ks_max_field;
      return finish({{"scaling_ks", tol, r.ks.statistic, 0.0, r.ks.statistic < tol}}, "scaling");
    }
    if (*bc_test) {
      FreeWiredRun run;
      run.L = c.L;
      run.a = c.a;
      run.beta = c.beta;
      run.samples = c.samples;
      run.thin = c.thin;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      const auto r = free_vs_wired_loops(run);
      write_file("bc_test.csv", free_wired_csv(r));
      return finish({{"free_wired_ks", c.ks_max, r.cluster_diameter.statistic, 0.0,
                      r.cluster_diameter.statistic < c.ks_max}},
                    "bc_test");
    }
    if (*sobolev) {
      CauchyRun run;
      run.L = c.L;
      run.a = c.a;
      run.epsilons = c.eps_list;
      run.alpha = c.alpha;
      run.modes = c.modes;
      run.samples = c.samples;
      run.thin = c.thin;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      const auto r = cutoff_cauchy_run(run);
      write_file("cauchy.csv", cauchy_csv(r.diag));
      // Norm report for one sample of the full field.
      SimParams p = c.sim_params();
      p.h = 0.0;
      Chain chain(build_box(c.a, c.L), p, BoundaryCondition::Free);
      for (std::int64_t i = 0; i <= c.burn_in; ++i) chain.sweep();
      std::vector<double> w(chain.spins().size());
      for (std::size_t s = 0; s < w.size(); ++s) w[s] = theta(c.a) * chain.spins()[s];
      const auto coeffs = lattice_coefficients(chain.domain(), w, chain.domain().region(), c.modes, c.modes);
      const auto norm = sobolev_norm(coeffs, c.alpha);
      if (norm.below_three_halves) std::cerr << "warning: alpha <= 3/2\n";
      write_file("norm.csv", norm_csv(c.alpha, norm));
      return finish({{"cauchy_slope", c.cauchy_min_slope, r.diag.fit.slope, r.diag.fit.slope_se,
                      r.diag.fit.slope >= c.cauchy_min_slope}},
                    "sobolev");
    }
    if (*loops) {
      SimParams p = c.sim_params();
      Chain chain(build_box(c.a, c.L), p, BoundaryCondition::Free);
      for (std::int64_t i = 0; i <= c.burn_in; ++i) chain.sweep();
      const auto traced = trace_loops(chain.domain(), chain.bonds());
      write_file("loops.jsonl", export_loops(traced));
      write_file("measures.jsonl", export_measures(rescaled_measures(chain.domain(), chain.decomposition())));
      return 0;
    }
    if (*metrics) {
      MeshDiagnosticRun run;
      run.a = c.a;
      run.epsilon = eps;
      run.burn_in = c.burn_in;
      run.seed = c.seed;
      const MeshDiagnosticRow row = mesh_diagnostic(run);
      write_file("mesh_diagnostic.csv", diagnostic_csv(std::span<const MeshDiagnosticRow>(&row, 1)));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
