#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fkising/config.hpp"
#include "fkising/lattice.hpp"

namespace fkising {

// Closed medial-lattice path. Vertices are midpoints of primal edges; the
// cluster it bounds lies on its left, so outer boundaries run counterclockwise
// and boundaries of holes clockwise.
struct MedialLoop {
  std::vector<Point> vertices;
  std::vector<EdgeIndex> edges;  // primal edge under each vertex
  std::int32_t cluster = -1;     // cluster on the left (ClusterDecomposition id)

  std::size_t length() const { return vertices.size(); }
  double signed_area() const;
  bool outer() const { return signed_area() > 0.0; }
};

// Loops separating FK clusters from dual clusters for a configuration with all
// external edges closed. Every medial edge (four per site) is used by exactly
// one loop. Throws UnsupportedBC when an external edge is open.
std::vector<MedialLoop> trace_loops(const LatticeDomain& d, const BondConfig& omega);

std::size_t medial_edge_count(const LatticeDomain& d);

// Connected components of the dual graph of the free-bc configuration: one dual
// vertex per unit face plus the outer face, a dual edge across every internal
// primal edge, open iff the primal edge is closed.
std::size_t count_dual_clusters(const LatticeDomain& d, const BondConfig& omega);

// Planar dual of a wired configuration: for a wired box with nx x ny sites the
// dual is a free box of (nx+1) x (ny+1) sites; dual edge open iff the primal
// edge it crosses is closed. The dual domain is stored on aZ^2; true dual
// positions are domain positions plus `offset` = (-a/2,-a/2).
struct DualConfig {
  LatticeDomain domain;
  BondConfig omega;
  Point offset;
};
DualConfig wired_dual(const LatticeDomain& d, const BondConfig& omega);

// JSON lines {loop_id, length, vertices:[[x,y],...]}.
std::string export_loops(std::span<const MedialLoop> loops);

}  // namespace fkising
