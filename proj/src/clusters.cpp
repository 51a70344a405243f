#include "fkising/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fkising/error.hpp"
#include "json.hpp"

namespace fkising {

ClusterDecomposition decompose(const kernels::ClusterLabels& labels) {
  ClusterDecomposition out;
  out.cluster_of = labels.label;
  out.sizes = labels.size;
  out.boundary = labels.boundary;
  const std::size_t k = labels.size.size();
  out.offsets.assign(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) out.offsets[c + 1] = out.offsets[c] + labels.size[c];
  out.members.resize(labels.label.size());
  std::vector<std::int32_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  for (std::size_t s = 0; s < labels.label.size(); ++s) {
    out.members[cursor[labels.label[s]]++] = static_cast<SiteIndex>(s);
  }
  return out;
}

ClusterDecomposition find_clusters(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc) {
  check_bc(d, omega, bc);
  kernels::LabelWorkspace ws;
  kernels::ClusterLabels labels;
  kernels::label_clusters(d, omega, bc, ws, labels);
  return decompose(labels);
}

namespace {

template <class P, class Cross>
std::vector<P> convex_hull(std::vector<P> pts, Cross cross) {
  std::sort(pts.begin(), pts.end(), [](const P& p, const P& q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const P& p, const P& q) { return p.x == q.x && p.y == q.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

struct IPoint {
  std::int64_t x, y;
};

double hull_diameter_sq(const std::vector<IPoint>& pts) {
  const auto hull = convex_hull(pts, [](const IPoint& o, const IPoint& a, const IPoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  });
  std::int64_t best = 0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      const std::int64_t dx = hull[i].x - hull[j].x, dy = hull[i].y - hull[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  return static_cast<double>(best);
}

// Sites are given in row-major order: the first and last member of each row
// are that row's extreme points, and only they can lie on the hull.
double lattice_diameter(const LatticeDomain& d, std::span<const SiteIndex> sites) {
  std::vector<IPoint> extremes;
  std::size_t i = 0;
  while (i < sites.size()) {
    const int r = d.row(sites[i]);
    std::size_t j = i;
    while (j + 1 < sites.size() && d.row(sites[j + 1]) == r) ++j;
    extremes.push_back({d.col(sites[i]), r});
    if (j != i) extremes.push_back({d.col(sites[j]), r});
    i = j + 1;
  }
  return d.mesh() * std::sqrt(hull_diameter_sq(extremes));
}

}  // namespace

double cluster_diameter(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyCluster, "diameter of an empty set");
  std::vector<Point> pts(points.begin(), points.end());
  const auto hull = convex_hull(pts, [](const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  });
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i)
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, distance(hull[i], hull[j]));
  return best;
}

double cluster_diameter(const LatticeDomain& d, std::span<const SiteIndex> sites) {
  if (sites.empty()) throw Error(ErrorKind::EmptyCluster, "diameter of an empty cluster");
  if (std::is_sorted(sites.begin(), sites.end())) return lattice_diameter(d, sites);
  std::vector<SiteIndex> sorted(sites.begin(), sites.end());
  std::sort(sorted.begin(), sorted.end());
  return lattice_diameter(d, sorted);
}

std::vector<double> cluster_diameters(const LatticeDomain& d, const ClusterDecomposition& decomp) {
  std::vector<double> out(decomp.num_clusters());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto sites = decomp.sites(static_cast<std::int32_t>(c));
    out[c] = sites.size() == 1 ? 0.0 : lattice_diameter(d, sites);
  }
  return out;
}

double CountingMeasure::integrate(const std::function<double(Point)>& f) const {
  double acc = 0.0;
  for (const Point& p : atoms) acc += f(p);
  return weight * acc;
}

std::vector<CountingMeasure> rescaled_measures(const LatticeDomain& d, const ClusterDecomposition& decomp) {
  const double w = theta(d.mesh());
  const auto diam = cluster_diameters(d, decomp);
  std::vector<CountingMeasure> out(decomp.num_clusters());
  for (std::size_t c = 0; c < out.size(); ++c) {
    CountingMeasure& m = out[c];
    m.cluster_id = static_cast<std::int32_t>(c);
    m.boundary = decomp.is_boundary(m.cluster_id);
    m.weight = w;
    m.diameter = diam[c];
    m.bbox = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (SiteIndex s : decomp.sites(m.cluster_id)) {
      const Point p = d.site_position(s);
      m.atoms.push_back(p);
      m.bbox.x0 = std::min(m.bbox.x0, p.x);
      m.bbox.y0 = std::min(m.bbox.y0, p.y);
      m.bbox.x1 = std::max(m.bbox.x1, p.x);
      m.bbox.y1 = std::max(m.bbox.y1, p.y);
    }
  }
  return out;
}

double cutoff_field_eval(std::span<const CountingMeasure> measures, std::span<const std::int8_t> signs,
                         double epsilon, const std::function<double(Point)>& f) {
  if (signs.size() < measures.size()) throw Error(ErrorKind::MissingSign, "fewer signs than clusters");
  double total = 0.0;
  for (std::size_t c = 0; c < measures.size(); ++c) {
    const int eta = signs[c];
    if (eta != 1 && eta != -1) throw Error(ErrorKind::MissingSign, "cluster " + std::to_string(c));
    if (measures[c].boundary && eta != 1) throw Error(ErrorKind::InvalidParameter, "boundary cluster must be +1");
    if (epsilon > 0.0 && !(measures[c].diameter > epsilon)) continue;
    total += eta * measures[c].integrate(f);
  }
  return total;
}

void band_weights(const ClusterDecomposition& decomp, std::span<const double> diameters,
                  std::span<const std::int8_t> signs, double a, double lo, double hi, std::vector<double>& out) {
  const double w = theta(a);
  out.assign(decomp.cluster_of.size(), 0.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    const std::int32_t c = decomp.cluster_of[s];
    const double dm = diameters[c];
    if ((lo <= 0.0 || dm > lo) && dm <= hi) out[s] = w * signs[c];
  }
}

std::string export_measures(std::span<const CountingMeasure> measures) {
  std::ostringstream os;
  for (const auto& m : measures) {
    nlohmann::json j{{"cluster_id", m.cluster_id},
                     {"size", m.atoms.size()},
                     {"mass", m.mass()},
                     {"diameter", m.diameter},
                     {"bbox", {m.bbox.x0, m.bbox.y0, m.bbox.x1, m.bbox.y1}}};
    os << j.dump() << '\n';
  }
  return os.str();
}

}  // namespace fkising
