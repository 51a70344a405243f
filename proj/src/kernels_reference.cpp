#include <cmath>

#include "fkising/kernels.hpp"

namespace fkising::kernels {

double plus_probability(double t) {
  // e^t / (2 cosh t) = 1 / (1 + e^{-2t}), written to stay finite for large |t|.
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-2.0 * t));
  const double e = std::exp(2.0 * t);
  return e / (1.0 + e);
}

namespace reference {

void sample_bonds(const LatticeDomain& d, const SpinConfig& sigma, double p, BoundaryCondition bc,
                  const CounterRng& rng, std::uint64_t step, BondConfig& out) {
  const auto n = static_cast<EdgeIndex>(d.num_edges());
  const std::uint64_t threshold = threshold32(p);
  out.bonds.assign(static_cast<std::size_t>(n), 0);
  for (EdgeIndex e = 0; e < n; ++e) {
    const EdgeInfo info = d.edge_info(e);
    if (!info.internal && bc == BoundaryCondition::Free) continue;
    if (sigma[static_cast<std::size_t>(info.first)] != far_spin(sigma, info)) continue;
    const std::uint32_t u = rng.words(StreamTag::Bonds, step, static_cast<std::uint32_t>(e >> 2))[e & 3];
    out.bonds[static_cast<std::size_t>(e)] = u < threshold ? 1 : 0;
  }
}

namespace {

std::int32_t find_root(std::vector<std::int32_t>& parent, std::int32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

void unite(std::vector<std::int32_t>& parent, std::vector<std::int32_t>& weight, std::int32_t a, std::int32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (weight[a] < weight[b]) std::swap(a, b);
  parent[b] = a;
  weight[a] += weight[b];
}

}  // namespace

void label_clusters(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc, LabelWorkspace& ws,
                    ClusterLabels& out) {
  const auto n_sites = static_cast<std::int32_t>(d.num_sites());
  const std::int32_t ghost = n_sites;
  ws.parent.resize(static_cast<std::size_t>(n_sites) + 1);
  ws.weight.assign(static_cast<std::size_t>(n_sites) + 1, 1);
  for (std::int32_t i = 0; i <= n_sites; ++i) ws.parent[i] = i;

  const auto n_edges = static_cast<EdgeIndex>(d.num_edges());
  for (EdgeIndex e = 0; e < n_edges; ++e) {
    if (!omega.open(e)) continue;
    const EdgeInfo info = d.edge_info(e);
    if (info.internal) {
      unite(ws.parent, ws.weight, info.first, *info.second);
    } else if (bc == BoundaryCondition::PlusWired) {
      unite(ws.parent, ws.weight, info.first, ghost);
    }
  }

  out.label.resize(static_cast<std::size_t>(n_sites));
  out.size.clear();
  out.boundary = -1;
  ws.remap.assign(static_cast<std::size_t>(n_sites) + 1, -1);
  const std::int32_t ghost_root = find_root(ws.parent, ghost);
  for (std::int32_t s = 0; s < n_sites; ++s) {
    const std::int32_t r = find_root(ws.parent, s);
    std::int32_t& id = ws.remap[r];
    if (id < 0) {
      id = static_cast<std::int32_t>(out.size.size());
      out.size.push_back(0);
      if (bc == BoundaryCondition::PlusWired && r == ghost_root) out.boundary = id;
    }
    out.label[s] = id;
    ++out.size[id];
  }
}

void draw_cluster_signs(const ClusterLabels& labels, double beta_h, const CounterRng& rng, std::uint64_t step,
                        std::vector<std::int8_t>& signs) {
  const auto k = static_cast<std::int32_t>(labels.num_clusters());
  signs.resize(static_cast<std::size_t>(k));
  for (std::int32_t c = 0; c < k; ++c) {
    if (c == labels.boundary) {
      signs[c] = 1;
      continue;
    }
    const double u = rng.uniform(StreamTag::ClusterSigns, step, static_cast<std::uint32_t>(c));
    signs[c] = u < plus_probability(beta_h * labels.size[c]) ? 1 : -1;
  }
}

void assign_spins(const ClusterLabels& labels, std::span<const std::int8_t> signs, SpinConfig& out) {
  out.spins.resize(labels.label.size());
  for (std::size_t s = 0; s < labels.label.size(); ++s) out.spins[s] = signs[labels.label[s]];
}

double pair_sum(const LatticeDomain& d, std::span<const double> value, int r, const Window& base_x,
                const Window& base_y) {
  double total = 0.0;
  for (int y = base_x.y_lo; y <= base_x.y_hi; ++y)
    for (int x = base_x.x_lo; x <= base_x.x_hi; ++x)
      total += value[d.site_at(x, y)] * value[d.site_at(x + r, y)];
  for (int y = base_y.y_lo; y <= base_y.y_hi; ++y)
    for (int x = base_y.x_lo; x <= base_y.x_hi; ++x)
      total += value[d.site_at(x, y)] * value[d.site_at(x, y + r)];
  return total;
}

double connected_pair_count(const LatticeDomain& d, std::span<const std::int32_t> label, int r,
                            const Window& base_x, const Window& base_y) {
  long long count = 0;
  for (int y = base_x.y_lo; y <= base_x.y_hi; ++y)
    for (int x = base_x.x_lo; x <= base_x.x_hi; ++x)
      count += label[d.site_at(x, y)] == label[d.site_at(x + r, y)];
  for (int y = base_y.y_lo; y <= base_y.y_hi; ++y)
    for (int x = base_y.x_lo; x <= base_y.x_hi; ++x)
      count += label[d.site_at(x, y)] == label[d.site_at(x, y + r)];
  return static_cast<double>(count);
}

double conditional_pair_sum(const LatticeDomain& d, std::span<const std::int32_t> label,
                            std::span<const double> cluster_mean, int r, const Window& base_x,
                            const Window& base_y) {
  const auto term = [&](SiteIndex s, SiteIndex t) {
    const std::int32_t a = label[s], b = label[t];
    return a == b ? 1.0 : cluster_mean[a] * cluster_mean[b];
  };
  double total = 0.0;
  for (int y = base_x.y_lo; y <= base_x.y_hi; ++y)
    for (int x = base_x.x_lo; x <= base_x.x_hi; ++x) total += term(d.site_at(x, y), d.site_at(x + r, y));
  for (int y = base_y.y_lo; y <= base_y.y_hi; ++y)
    for (int x = base_y.x_lo; x <= base_y.x_hi; ++x) total += term(d.site_at(x, y), d.site_at(x, y + r));
  return total;
}

void separable_transform(std::span<const double> w, int nx, int ny, std::span<const double> sx, int mx,
                         std::span<const double> sy, int my, std::vector<double>& out) {
  // tmp[m][y] = sum_x w[y][x] sx[m][x], then out[m][n] = sum_y tmp[m][y] sy[n][y].
  std::vector<double> tmp(static_cast<std::size_t>(mx) * ny);
  for (int m = 0; m < mx; ++m)
    for (int y = 0; y < ny; ++y) {
      const double* wr = &w[static_cast<std::size_t>(y) * nx];
      const double* sr = &sx[static_cast<std::size_t>(m) * nx];
      double acc = 0.0;
      for (int x = 0; x < nx; ++x) acc += wr[x] * sr[x];
      tmp[static_cast<std::size_t>(m) * ny + y] = acc;
    }
  out.assign(static_cast<std::size_t>(mx) * my, 0.0);
  for (int m = 0; m < mx; ++m)
    for (int n = 0; n < my; ++n) {
      const double* tr = &tmp[static_cast<std::size_t>(m) * ny];
      const double* sr = &sy[static_cast<std::size_t>(n) * ny];
      double acc = 0.0;
      for (int y = 0; y < ny; ++y) acc += tr[y] * sr[y];
      out[static_cast<std::size_t>(m) * my + n] = acc;
    }
}

}  // namespace reference
}  // namespace fkising::kernels
