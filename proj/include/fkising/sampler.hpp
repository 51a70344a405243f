#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fkising/clusters.hpp"
#include "fkising/config.hpp"
#include "fkising/kernels.hpp"
#include "fkising/lattice.hpp"
#include "fkising/params.hpp"
#include "fkising/rng.hpp"

namespace fkising {

struct ChainState {
  SpinConfig sigma;
  BondConfig omega;
};

// Draws are indexed by `step`, so the same (rng, step) reproduces the same draw.
BondConfig sample_bonds_given_spins(const LatticeDomain& d, const SpinConfig& sigma, const SimParams& params,
                                    BoundaryCondition bc, const CounterRng& rng, std::uint64_t step);
SpinConfig sample_spins_given_bonds(const LatticeDomain& d, const BondConfig& omega, const SimParams& params,
                                    BoundaryCondition bc, const CounterRng& rng, std::uint64_t step);

// Bonds given spins, then spins given bonds. Throws IncompatibleState unless omega ~ sigma.
ChainState sw_field_step(const LatticeDomain& d, const ChainState& state, const SimParams& params,
                         BoundaryCondition bc, const CounterRng& rng, std::uint64_t step);

struct Magnetization {
  long long bare = 0;
  double rescaled = 0.0;
};
Magnetization magnetization(const SpinConfig& sigma, double a);

// One retained sweep. `obs` carries estimator-specific measurements.
struct Record {
  std::uint64_t chain_id = 0;
  std::int64_t sweep = 0;
  long long bare_mag = 0;
  double rescaled_mag = 0.0;
  std::int64_t n_clusters = 0;
  std::int64_t max_cluster = 0;
  std::int64_t boundary_cluster_size = 0;
  std::vector<double> obs;

  friend bool operator==(const Record&, const Record&) = default;
};

std::string to_json_line(const Record& r);
Record parse_record(const std::string& line);
std::vector<Record> parse_records(const std::string& text);
void sort_records(std::vector<Record>& records);

// Field-coupled Swendsen-Wang chain owning its state, started from all plus
// spins and all bonds closed.
class Chain {
 public:
  Chain(LatticeDomain domain, SimParams params, BoundaryCondition bc);

  void sweep();
  std::int64_t steps_done() const { return static_cast<std::int64_t>(step_); }

  const LatticeDomain& domain() const { return domain_; }
  const SimParams& params() const { return params_; }
  BoundaryCondition bc() const { return bc_; }
  const SpinConfig& spins() const { return sigma_; }
  const BondConfig& bonds() const { return omega_; }
  const kernels::ClusterLabels& labels() const { return labels_; }

  // E[sigma_x | omega] per cluster: tanh(beta H |C|), 1 for the boundary cluster.
  std::vector<double> cluster_means() const;
  ClusterDecomposition decomposition() const { return decompose(labels_); }
  Record record() const;

 private:
  LatticeDomain domain_;
  SimParams params_;
  BoundaryCondition bc_;
  CounterRng rng_;
  std::uint64_t step_ = 0;
  SpinConfig sigma_;
  BondConfig omega_;
  kernels::ClusterLabels labels_;
  kernels::LabelWorkspace ws_;
  std::vector<std::int8_t> signs_;
};

struct ReweightSample {
  std::vector<std::int32_t> internal_sizes;
  std::int32_t boundary_size = 0;
  double value = 0.0;

  static ReweightSample from(const ClusterDecomposition& decomp, double value);
};

struct ReweightResult {
  double estimate = 0.0;
  double ess = 0.0;
};

// Self-normalized importance estimate of E_h[g] from H = 0 samples with
// weights e^{beta H |C_b|} prod_i cosh(beta H |C_i|). Throws DegenerateWeights
// when the effective sample size falls below ess_floor.
ReweightResult reweight_to_field(std::span<const ReweightSample> samples, const SimParams& target,
                                 double ess_floor = 100.0);

}  // namespace fkising
