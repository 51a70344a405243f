#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fkising/config.hpp"
#include "fkising/lattice.hpp"
#include "fkising/rng.hpp"

// Hot loops of the field-coupled Swendsen-Wang sweep and of the measurement
// passes. The default namespace holds the OpenMP versions; `reference` holds
// plain serial loops with identical results, kept for testing and for the
// benchmark target.
namespace fkising::kernels {

struct ClusterLabels {
  std::vector<std::int32_t> label;  // site -> cluster id, ids in order of first row-major appearance
  std::vector<std::int32_t> size;   // cluster id -> number of sites
  std::int32_t boundary = -1;       // id of the boundary cluster, -1 when there is none

  std::size_t num_clusters() const { return size.size(); }
};

struct LabelWorkspace {
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> weight;
  std::vector<std::int32_t> root;
  std::vector<std::int32_t> remap;
};

// Probability that cluster C takes sign +1 given the bonds: e^{t}/(2 cosh t), t = beta*H*|C|.
double plus_probability(double t);

// Open each edge whose endpoint spins agree (boundary spins +1 under PlusWired)
// with probability p; all other edges closed, external edges closed under Free.
// Edge e compares word e % 4 of the Bonds draw with index e / 4 against threshold32(p).
void sample_bonds(const LatticeDomain& d, const SpinConfig& sigma, double p, BoundaryCondition bc,
                  const CounterRng& rng, std::uint64_t step, BondConfig& out);

// Connected components of the open edges. Under PlusWired the whole site
// boundary acts as one extra vertex; the component containing it, restricted to
// the domain, is the boundary cluster.
void label_clusters(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc, LabelWorkspace& ws,
                    ClusterLabels& out);

// Boundary cluster +1; every other cluster +1 with plus_probability(beta_h * |C|).
void draw_cluster_signs(const ClusterLabels& labels, double beta_h, const CounterRng& rng, std::uint64_t step,
                        std::vector<std::int8_t>& signs);

void assign_spins(const ClusterLabels& labels, std::span<const std::int8_t> signs, SpinConfig& out);

// Sum over base sites in [x_lo,x_hi] x [y_lo,y_hi] of value(x) * value(x + r e) for
// e in {x-hat, y-hat}; callers guarantee x + r e stays inside the lattice.
struct Window {
  int x_lo = 0, x_hi = -1, y_lo = 0, y_hi = -1;
  int count() const { return (x_hi >= x_lo && y_hi >= y_lo) ? (x_hi - x_lo + 1) * (y_hi - y_lo + 1) : 0; }
};
double pair_sum(const LatticeDomain& d, std::span<const double> value, int r, const Window& base_x,
                const Window& base_y);

// Number of base sites (in the two windows) connected to their r-shifted partner.
double connected_pair_count(const LatticeDomain& d, std::span<const std::int32_t> label, int r,
                            const Window& base_x, const Window& base_y);

// Mixed estimator for <sigma_x sigma_y> given the bonds: 1 when connected,
// t(x) t(y) otherwise, summed over base sites.
double conditional_pair_sum(const LatticeDomain& d, std::span<const std::int32_t> label,
                            std::span<const double> cluster_mean, int r, const Window& base_x,
                            const Window& base_y);

// coeff[m][n] = sum_{sites} w(site) * sx[m][col] * sy[n][row], the separable
// 2D sine sum used for Dirichlet eigenfunction coefficients. sx is (mx x nx),
// sy is (my x ny), both row-major; out is (mx x my) row-major.
void separable_transform(std::span<const double> w, int nx, int ny, std::span<const double> sx, int mx,
                         std::span<const double> sy, int my, std::vector<double>& out);

namespace reference {

void sample_bonds(const LatticeDomain& d, const SpinConfig& sigma, double p, BoundaryCondition bc,
                  const CounterRng& rng, std::uint64_t step, BondConfig& out);
void label_clusters(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc, LabelWorkspace& ws,
                    ClusterLabels& out);
void draw_cluster_signs(const ClusterLabels& labels, double beta_h, const CounterRng& rng, std::uint64_t step,
                        std::vector<std::int8_t>& signs);
void assign_spins(const ClusterLabels& labels, std::span<const std::int8_t> signs, SpinConfig& out);
double pair_sum(const LatticeDomain& d, std::span<const double> value, int r, const Window& base_x,
                const Window& base_y);
double connected_pair_count(const LatticeDomain& d, std::span<const std::int32_t> label, int r,
                            const Window& base_x, const Window& base_y);
double conditional_pair_sum(const LatticeDomain& d, std::span<const std::int32_t> label,
                            std::span<const double> cluster_mean, int r, const Window& base_x,
                            const Window& base_y);
void separable_transform(std::span<const double> w, int nx, int ny, std::span<const double> sx, int mx,
                         std::span<const double> sy, int my, std::vector<double>& out);

}  // namespace reference

int max_threads();

}  // namespace fkising::kernels
