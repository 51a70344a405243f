#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fkising/config.hpp"
#include "fkising/kernels.hpp"
#include "fkising/lattice.hpp"

namespace fkising {

// Partition of the sites into FK clusters. Members of each cluster are stored
// contiguously (CSR layout) in row-major order; cluster ids follow the order in
// which clusters first appear in a row-major scan.
struct ClusterDecomposition {
  std::vector<std::int32_t> cluster_of;
  std::vector<std::int32_t> sizes;
  std::vector<std::int32_t> offsets;
  std::vector<SiteIndex> members;
  std::int32_t boundary = -1;

  std::size_t num_clusters() const { return sizes.size(); }
  std::size_t num_internal() const { return sizes.size() - (boundary >= 0 ? 1 : 0); }
  bool is_boundary(std::int32_t c) const { return c == boundary; }
  std::int32_t boundary_size() const { return boundary >= 0 ? sizes[boundary] : 0; }
  std::span<const SiteIndex> sites(std::int32_t c) const {
    return {members.data() + offsets[c], static_cast<std::size_t>(sizes[c])};
  }
};

ClusterDecomposition find_clusters(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc);
ClusterDecomposition decompose(const kernels::ClusterLabels& labels);

// Euclidean diameter of a finite point set. Throws EmptyCluster.
double cluster_diameter(std::span<const Point> points);
double cluster_diameter(const LatticeDomain& d, std::span<const SiteIndex> sites);
std::vector<double> cluster_diameters(const LatticeDomain& d, const ClusterDecomposition& decomp);

struct CountingMeasure {
  std::int32_t cluster_id = -1;
  bool boundary = false;
  std::vector<Point> atoms;
  double weight = 0.0;  // a^{15/8}
  double diameter = 0.0;
  Rect bbox;

  double mass() const { return weight * static_cast<double>(atoms.size()); }
  double integrate(const std::function<double(Point)>& f) const;
};

std::vector<CountingMeasure> rescaled_measures(const LatticeDomain& d, const ClusterDecomposition& decomp);

// Sum of eta_C mu_C(f) over clusters with diameter > epsilon; epsilon <= 0
// keeps every cluster, singletons included. Throws MissingSign when a cluster
// has no +-1 sign, InvalidParameter when a boundary cluster is not +1.
double cutoff_field_eval(std::span<const CountingMeasure> measures, std::span<const std::int8_t> signs,
                         double epsilon, const std::function<double(Point)>& f);

// Per-site weights a^{15/8} eta_C for clusters with lo < diam(C) <= hi, zero
// elsewhere; lo <= 0 admits singletons.
void band_weights(const ClusterDecomposition& decomp, std::span<const double> diameters,
                  std::span<const std::int8_t> signs, double a, double lo, double hi, std::vector<double>& out);

// JSON lines {cluster_id, size, mass, diameter, bbox}.
std::string export_measures(std::span<const CountingMeasure> measures);

}  // namespace fkising
