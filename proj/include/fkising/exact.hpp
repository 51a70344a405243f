#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fkising/config.hpp"
#include "fkising/lattice.hpp"
#include "fkising/params.hpp"

namespace fkising {

struct ExactLimits {
  int max_sites = 12;
  int max_edges = 12;
  int max_joint_bits = 20;
};

// Exhaustive distribution over spin states (bit i set: site i is +1), bond
// states (bit e set: edge e open) or joint states (spins in the low bits,
// bonds above them).
struct ExactDistribution {
  enum class Kind { Spins, Bonds, Joint };

  Kind kind = Kind::Spins;
  int n_sites = 0;
  int n_edges = 0;
  std::vector<double> prob;
  long double log_z = 0.0L;

  long double z() const;
  double expectation(const std::function<double(std::uint64_t)>& g) const;
};

SpinConfig spins_from_bits(const LatticeDomain& d, std::uint64_t bits);
BondConfig bonds_from_bits(const LatticeDomain& d, std::uint64_t bits);
std::uint64_t spins_to_bits(const SpinConfig& sigma);
std::uint64_t bonds_to_bits(const BondConfig& omega);

// Throws DomainTooLarge beyond the limits.
ExactDistribution enumerate_ising(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                                  const ExactLimits& limits = {});
ExactDistribution enumerate_fk(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                               bool with_field, const ExactLimits& limits = {});
ExactDistribution enumerate_joint(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                                  const ExactLimits& limits = {});

ExactDistribution spin_marginal(const ExactDistribution& joint);
ExactDistribution bond_marginal(const ExactDistribution& joint);

// P(cluster takes +1 | omega) for every cluster, ordered as in find_clusters,
// obtained by summing the joint weight over all spin states.
std::vector<double> exact_conditional_eta(const LatticeDomain& d, const BondConfig& omega, const SimParams& params,
                                          BoundaryCondition bc, const ExactLimits& limits = {});

// {domain, params, bc, observables:{...}, Z}
std::string export_oracle(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                          const ExactDistribution& dist);

}  // namespace fkising
