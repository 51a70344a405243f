#pragma once

#include <cmath>
#include <cstdint>

namespace fkising {

inline const double kBetaCritical = 0.5 * std::log1p(std::sqrt(2.0));

// Bond probability p = 1 - e^{-2 beta}.
inline double bond_probability(double beta) { return -std::expm1(-2.0 * beta); }

struct SimParams {
  double beta = kBetaCritical;
  double h = 0.0;  // continuum field; lattice field H = h a^{15/8}
  double a = 1.0;
  std::int64_t sweeps = 1000;
  std::int64_t burn_in = 100;
  std::int64_t thin = 1;
  std::uint64_t seed = 1;
  std::uint64_t chain_id = 0;

  double lattice_field() const;
  double beta_h() const { return beta * lattice_field(); }
  double p() const { return bond_probability(beta); }

  // Throws InvalidParameter: beta < 0, a <= 0, h < 0 (negative fields are not
  // supported), H > a^{-15/8}, sweeps < 1, burn_in < 0, thin < 1.
  void validate() const;
};

// log cosh t, finite for any real t.
inline double log_cosh(double t) {
  const double x = std::fabs(t);
  return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

}  // namespace fkising
