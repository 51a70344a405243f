#include "fkising/loops.hpp"

#include <algorithm>
#include <sstream>

#include "fkising/clusters.hpp"
#include "fkising/error.hpp"
#include "fkising/union_find.hpp"
#include "json.hpp"

namespace fkising {

double MedialLoop::signed_area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Point& p = vertices[i];
    const Point& q = vertices[(i + 1) % vertices.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return 0.5 * twice;
}

std::size_t medial_edge_count(const LatticeDomain& d) { return 4 * d.num_sites(); }

std::vector<MedialLoop> trace_loops(const LatticeDomain& d, const BondConfig& omega) {
  check_sizes(d, omega);
  for (EdgeIndex e : d.external_edges()) {
    if (omega.open(e)) throw Error(ErrorKind::UnsupportedBC, "loops are traced for free-bc configurations only");
  }
  const auto clusters = find_clusters(d, omega, BoundaryCondition::Free);
  const double half = 0.5 * d.mesh();

  // State (s, k): the medial edge around site s running counterclockwise from
  // the midpoint of edge (s, k) to the midpoint of edge (s, k+1).
  const std::size_t n_states = medial_edge_count(d);
  std::vector<std::uint8_t> seen(n_states, 0);
  std::vector<MedialLoop> loops;
  for (std::size_t start = 0; start < n_states; ++start) {
    if (seen[start]) continue;
    MedialLoop loop;
    loop.cluster = clusters.cluster_of[start / 4];
    std::size_t state = start;
    do {
      seen[state] = 1;
      const auto s = static_cast<SiteIndex>(state / 4);
      const int k = static_cast<int>(state % 4);
      const Point c = d.site_position(s);
      loop.vertices.push_back({c.x + half * kDirDx[k], c.y + half * kDirDy[k]});
      loop.edges.push_back(d.edge(s, static_cast<Dir>(k)));
      const Dir next = ccw_next(static_cast<Dir>(k));
      const EdgeIndex e = d.edge(s, next);
      if (omega.open(e)) {
        const SiteIndex t = *d.neighbor_site(s, next);
        state = static_cast<std::size_t>(t) * 4 + static_cast<int>(opposite(next));
      } else {
        state = static_cast<std::size_t>(s) * 4 + static_cast<int>(next);
      }
    } while (state != start);
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::size_t count_dual_clusters(const LatticeDomain& d, const BondConfig& omega) {
  check_sizes(d, omega);
  const int nx = d.nx(), ny = d.ny();
  // Faces (c, r) with 0 <= c < nx-1, 0 <= r < ny-1 have lower-left corner at site (c, r).
  const int fx = std::max(nx - 1, 0), fy = std::max(ny - 1, 0);
  const auto outer = static_cast<std::int32_t>(fx * fy);
  const auto face = [&](int c, int r) -> std::int32_t {
    if (c < 0 || r < 0 || c >= fx || r >= fy) return outer;
    return r * fx + c;
  };
  UnionFind uf(static_cast<std::size_t>(outer) + 1);
  for (EdgeIndex e : d.internal_edges()) {
    if (omega.open(e)) continue;
    const EdgeInfo info = d.edge_info(e);
    const int c = d.col(info.first), r = d.row(info.first);
    if (e < static_cast<EdgeIndex>(d.num_horizontal_edges())) {
      uf.unite(face(c, r - 1), face(c, r));  // horizontal edge (c,r)-(c+1,r)
    } else {
      uf.unite(face(c - 1, r), face(c, r));  // vertical edge (c,r)-(c,r+1)
    }
  }
  return uf.components();
}

DualConfig wired_dual(const LatticeDomain& d, const BondConfig& omega) {
  check_sizes(d, omega);
  const int nx = d.nx(), ny = d.ny();
  const double a = d.mesh();
  DualConfig out;
  out.domain = build_domain(a, Rect{d.i0() * a, d.j0() * a, (d.i0() + nx) * a, (d.j0() + ny) * a});
  out.offset = {-0.5 * a, -0.5 * a};
  out.omega = BondConfig::all_closed(out.domain);
  const LatticeDomain& g = out.domain;
  const auto n_h = static_cast<EdgeIndex>(d.num_horizontal_edges());
  for (int r = 0; r <= ny; ++r)
    for (int c = 0; c < nx; ++c) {
      // dual (c,r)-(c+1,r) crosses primal vertical edge of layer r, column c
      const EdgeIndex primal = n_h + r * nx + c;
      out.omega[static_cast<std::size_t>(g.edge(g.site_at(c, r), Dir::East))] = omega.open(primal) ? 0 : 1;
    }
  for (int r = 0; r < ny; ++r)
    for (int c = 0; c <= nx; ++c) {
      // dual (c,r)-(c,r+1) crosses primal horizontal edge k = c of row r
      const EdgeIndex primal = r * (nx + 1) + c;
      out.omega[static_cast<std::size_t>(g.edge(g.site_at(c, r), Dir::North))] = omega.open(primal) ? 0 : 1;
    }
  return out;
}

std::string export_loops(std::span<const MedialLoop> loops) {
  std::ostringstream os;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    nlohmann::json verts = nlohmann::json::array();
    for (const Point& p : loops[i].vertices) verts.push_back({p.x, p.y});
    os << nlohmann::json{{"loop_id", i}, {"length", loops[i].length()}, {"vertices", verts}}.dump() << '\n';
  }
  return os.str();
}

}  // namespace fkising
