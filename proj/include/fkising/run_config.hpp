#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fkising/lattice.hpp"
#include "fkising/params.hpp"

namespace fkising {

// Key-value run configuration, INI syntax:
//
//   [lattice]    a, L, bc (free | plus)
//   [params]     beta, h, seed, sweeps, burn_in, thin, chains
//   [run]        r_list, a_list, h_list, eps_list (comma separated),
//                lambda, alpha, samples, modes
//   [tolerances] slope_tol, norm_spread, z_max, ks_max, ks_max_field,
//                mass_tol, cauchy_min_slope
//
// Missing keys keep their defaults.
struct RunConfig {
  double a = 1.0 / 64;
  int L = 64;
  BoundaryCondition bc = BoundaryCondition::Free;

  double beta = kBetaCritical;
  double h = 0.0;
  std::uint64_t seed = 1;
  std::int64_t sweeps = 1000;
  std::int64_t burn_in = 100;
  std::int64_t thin = 1;
  int chains = 1;

  std::vector<int> r_list{4, 6, 8, 11, 16, 23, 32};
  std::vector<double> a_list{1.0 / 64, 1.0 / 128, 1.0 / 256};
  std::vector<double> h_list{0.5, 1.0, 2.0, 4.0};
  std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125};
  double lambda = 2.0;
  double alpha = 2.0;
  std::int64_t samples = 10000;
  int modes = 128;

  double slope_tol = 0.03;
  double norm_spread = 0.25;
  double z_max = 3.0;
  double ks_max = 0.05;
  double ks_max_field = 0.07;
  double mass_tol = 0.08;
  double cauchy_min_slope = 1.4;

  SimParams sim_params() const;
};

// Throws ParseError on malformed input or values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
std::string to_ini(const RunConfig& c);

}  // namespace fkising
