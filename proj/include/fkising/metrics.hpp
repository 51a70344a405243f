#pragma once

#include <span>
#include <string>
#include <vector>

#include "fkising/lattice.hpp"

namespace fkising {

struct PolyLoop {
  std::vector<Point> vertices;  // cyclic; the closing edge is implicit
};

struct Atom {
  Point position;
  double weight = 0.0;
};

struct FiniteMeasure2D {
  std::vector<Atom> atoms;

  double total_mass() const;
};

using PointSet = std::vector<Point>;

// Cyclic discrete Frechet distance: the best monotone cyclic vertex coupling,
// minimized over the starting vertex of L2 (orientation preserving). It exceeds
// the continuous Frechet distance by at most the longest edge. Throws
// DegenerateLoop for fewer than 3 vertices.
double loop_distance(const PolyLoop& l1, const PolyLoop& l2);

// Hausdorff distance of loop collections under loop_distance. Throws EmptyEnsemble.
double loop_ensemble_distance(std::span<const PolyLoop> f1, std::span<const PolyLoop> f2);

// Hausdorff distance of two nonempty point sets.
double hausdorff(const PointSet& a, const PointSet& b);

// Hausdorff distance of collections under hausdorff(). Throws EmptyCollection.
double cluster_collection_distance(std::span<const PointSet> s1, std::span<const PointSet> s2);

// Smallest eps >= 0 with mu(A) <= nu(A^eps) + eps and nu(A) <= mu(A^eps) + eps
// for every A, A^eps the closed eps-neighbourhood. Exact for any number of
// atoms: the worst set deficiency at a given eps is a max-flow complement.
double prokhorov_distance(const FiniteMeasure2D& mu, const FiniteMeasure2D& nu);

// Hausdorff distance of measure collections under prokhorov_distance. Throws EmptyCollection.
double measure_collection_distance(std::span<const FiniteMeasure2D> s1, std::span<const FiniteMeasure2D> s2);

struct MeshDiagnosticRow {
  double a = 0.0;
  double a_half = 0.0;
  double d_cl = 0.0;
  double d_meas = 0.0;
  double d_le = 0.0;
  std::size_t n_clusters_large = 0;
  double epsilon_cutoff = 0.0;
};

std::string diagnostic_csv(std::span<const MeshDiagnosticRow> rows);

}  // namespace fkising
