#include "fkising/lattice.hpp"

#include <cmath>

#include "fkising/error.hpp"
#include "json.hpp"

namespace fkising {

double distance(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

double theta(double a) { return std::pow(a, 15.0 / 8.0); }

double Rect::diameter() const { return std::hypot(width(), height()); }

bool Rect::contains(Point p, double tol) const {
  return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
}

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Free ? "free" : "plus";
}

BoundaryCondition parse_boundary_condition(const std::string& s) {
  if (s == "free") return BoundaryCondition::Free;
  if (s == "plus" || s == "wired") return BoundaryCondition::PlusWired;
  throw Error(ErrorKind::ParseError, "unknown boundary condition '" + s + "'");
}

std::size_t LatticeDomain::num_internal_edges() const {
  return static_cast<std::size_t>(ny_) * (nx_ - 1) + static_cast<std::size_t>(nx_) * (ny_ - 1);
}

Point LatticeDomain::lattice_position(int c, int r) const {
  return {static_cast<double>(i0_ + c) * mesh_, static_cast<double>(j0_ + r) * mesh_};
}

Point LatticeDomain::site_position(SiteIndex s) const { return lattice_position(col(s), row(s)); }

std::optional<SiteIndex> LatticeDomain::neighbor_site(SiteIndex s, Dir d) const {
  const int k = static_cast<int>(d);
  const int c = col(s) + kDirDx[k];
  const int r = row(s) + kDirDy[k];
  if (c < 0 || c >= nx_ || r < 0 || r >= ny_) return std::nullopt;
  return site_at(c, r);
}

bool LatticeDomain::is_internal(EdgeIndex e) const {
  const auto h = static_cast<EdgeIndex>(num_horizontal_edges());
  if (e < h) {
    const int k = e % (nx_ + 1);
    return k != 0 && k != nx_;
  }
  const int layer = (e - h) / nx_;
  return layer != 0 && layer != ny_;
}

EdgeInfo LatticeDomain::edge_info(EdgeIndex e) const {
  EdgeInfo info;
  const auto h = static_cast<EdgeIndex>(num_horizontal_edges());
  int c0, r0, c1, r1;
  if (e < h) {
    r0 = r1 = e / (nx_ + 1);
    c1 = e % (nx_ + 1);
    c0 = c1 - 1;
  } else {
    c0 = c1 = (e - h) % nx_;
    r1 = (e - h) / nx_;
    r0 = r1 - 1;
  }
  const bool first_inside = c0 >= 0 && r0 >= 0;
  const bool second_inside = c1 < nx_ && r1 < ny_;
  info.internal = first_inside && second_inside;
  if (info.internal) {
    info.first = site_at(c0, r0);
    info.second = site_at(c1, r1);
    info.outer = lattice_position(c1, r1);
  } else if (first_inside) {
    info.first = site_at(c0, r0);
    info.outer = lattice_position(c1, r1);
  } else {
    info.first = site_at(c1, r1);
    info.outer = lattice_position(c0, r0);
  }
  return info;
}

std::vector<Point> LatticeDomain::boundary_sites() const {
  std::vector<Point> out;
  out.reserve(external_edges_.size());
  for (EdgeIndex e : external_edges_) out.push_back(edge_info(e).outer);
  return out;
}

LatticeDomain build_domain(double a, const Rect& rect) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidParameter, "lattice spacing must be positive");
  if (!(rect.x1 >= rect.x0) || !(rect.y1 >= rect.y0)) throw Error(ErrorKind::InvalidParameter, "degenerate rectangle");
  // Relative tolerance so that points lying on the closed boundary are kept.
  const double tol = 1e-9;
  const auto lo = [&](double v) { return static_cast<int>(std::ceil(v / a - tol)); };
  const auto hi = [&](double v) { return static_cast<int>(std::floor(v / a + tol)); };
  const int i0 = lo(rect.x0), i1 = hi(rect.x1);
  const int j0 = lo(rect.y0), j1 = hi(rect.y1);
  if (i1 < i0 || j1 < j0) throw Error(ErrorKind::EmptyDomain, "no lattice point inside the rectangle");

  LatticeDomain d;
  d.mesh_ = a;
  d.region_ = rect;
  d.i0_ = i0;
  d.j0_ = j0;
  d.nx_ = i1 - i0 + 1;
  d.ny_ = j1 - j0 + 1;
  const auto n_edges = static_cast<EdgeIndex>(d.num_edges());
  d.internal_edges_.reserve(d.num_internal_edges());
  d.external_edges_.reserve(d.num_external_edges());
  for (EdgeIndex e = 0; e < n_edges; ++e) {
    (d.is_internal(e) ? d.internal_edges_ : d.external_edges_).push_back(e);
  }
  return d;
}

LatticeDomain build_box(double a, int side) {
  if (side < 0) throw Error(ErrorKind::InvalidParameter, "box side must be nonnegative");
  const double s = a * side;
  return build_domain(a, Rect{0.0, 0.0, s, s});
}

std::array<Neighbor, 4> neighbors(const LatticeDomain& domain, SiteIndex site) {
  if (!domain.contains_site(site)) throw Error(ErrorKind::UnknownSite, "site " + std::to_string(site));
  std::array<Neighbor, 4> out;
  const int c = domain.col(site), r = domain.row(site);
  for (Dir d : kAllDirs) {
    const int k = static_cast<int>(d);
    Neighbor& n = out[k];
    n.dir = d;
    n.edge = domain.edge(site, d);
    n.site = domain.neighbor_site(site, d);
    n.internal = n.site.has_value();
    n.position = domain.lattice_position(c + kDirDx[k], r + kDirDy[k]);
  }
  return out;
}

std::string serialize(const DomainDescriptor& d) {
  nlohmann::json j;
  j["a"] = d.a;
  j["rect"] = {d.rect.x0, d.rect.y0, d.rect.x1, d.rect.y1};
  j["bc"] = to_string(d.bc);
  return j.dump();
}

DomainDescriptor parse_domain_descriptor(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    DomainDescriptor d;
    d.a = j.at("a").get<double>();
    const auto& r = j.at("rect");
    if (!r.is_array() || r.size() != 4) throw Error(ErrorKind::ParseError, "rect must hold 4 numbers");
    d.rect = Rect{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
    d.bc = parse_boundary_condition(j.value("bc", std::string("free")));
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

}  // namespace fkising
