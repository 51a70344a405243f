#include <omp.h>

#include <algorithm>

#include "fkising/kernels.hpp"

namespace fkising::kernels {
namespace {

// Below this many sites the fork/join costs more than the loop. libgomp
// allocates a team even for if(false) regions, so small inputs skip the
// pragma entirely.
constexpr std::int64_t kParallelMinSites = 4096;

template <class I, class F>
void parallel_for(I n, bool par, F&& f) {
  if (!par) {
    for (I i = 0; i < n; ++i) f(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (I i = 0; i < n; ++i) f(i);
}

struct Ends {
  SiteIndex first;
  SiteIndex second;  // -1 for external edges
};

inline Ends decode(EdgeIndex e, int nx, int ny, EdgeIndex n_horizontal) {
  if (e < n_horizontal) {
    const int row = e / (nx + 1);
    const int k = e % (nx + 1);
    if (k == 0) return {row * nx, -1};
    if (k == nx) return {row * nx + nx - 1, -1};
    return {row * nx + k - 1, row * nx + k};
  }
  const int v = e - n_horizontal;
  const int layer = v / nx;
  const int col = v % nx;
  if (layer == 0) return {col, -1};
  if (layer == ny) return {(ny - 1) * nx + col, -1};
  return {(layer - 1) * nx + col, layer * nx + col};
}

inline std::int32_t find_root(std::int32_t* parent, std::int32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

inline std::int32_t find_root_readonly(const std::int32_t* parent, std::int32_t x) {
  while (parent[x] != x) x = parent[x];
  return x;
}

// Linking the larger root under the smaller keeps every root equal to the
// smallest site index of its set, i.e. its first site in row-major order.
inline void link(std::int32_t* parent, std::int32_t a, std::int32_t b) {
  a = find_root(parent, a);
  b = find_root(parent, b);
  if (a == b) return;
  if (a < b) {
    parent[b] = a;
  } else {
    parent[a] = b;
  }
}

class WordCache {
 public:
  WordCache(const CounterRng& rng, std::uint64_t step) : rng_(rng), step_(step) {}
  std::uint32_t operator()(EdgeIndex e) {
    const EdgeIndex q = e >> 2;
    if (q != current_) {
      words_ = rng_.words(StreamTag::Bonds, step_, static_cast<std::uint32_t>(q));
      current_ = q;
    }
    return words_[e & 3];
  }

 private:
  const CounterRng& rng_;
  std::uint64_t step_;
  EdgeIndex current_ = -1;
  Philox::Counter words_{};
};

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void sample_bonds(const LatticeDomain& d, const SpinConfig& sigma, double p, BoundaryCondition bc,
                  const CounterRng& rng, std::uint64_t step, BondConfig& out) {
  const int nx = d.nx(), ny = d.ny();
  const auto n_h = static_cast<EdgeIndex>(d.num_horizontal_edges());
  const bool wired = bc == BoundaryCondition::PlusWired;
  const std::uint64_t threshold = threshold32(p);
  out.bonds.resize(d.num_edges());
  const std::int8_t* s = sigma.spins.data();
  std::uint8_t* w = out.bonds.data();
  const bool par = static_cast<std::int64_t>(d.num_sites()) >= kParallelMinSites;

  // Lines 0..ny-1 are rows of horizontal edges, lines ny..2ny are layers of vertical edges.
  parallel_for(2 * ny + 1, par, [&](int line) {
    WordCache word(rng, step);
    if (line < ny) {
      const std::int8_t* row = s + static_cast<std::ptrdiff_t>(line) * nx;
      const EdgeIndex base = line * (nx + 1);
      for (int k = 0; k <= nx; ++k) {
        bool agree;
        if (k == 0) {
          agree = wired && row[0] == 1;
        } else if (k == nx) {
          agree = wired && row[nx - 1] == 1;
        } else {
          agree = row[k - 1] == row[k];
        }
        w[base + k] = static_cast<std::uint8_t>(agree & (word(base + k) < threshold));
      }
    } else {
      const int layer = line - ny;
      const EdgeIndex base = n_h + layer * nx;
      const std::int8_t* below = s + static_cast<std::ptrdiff_t>(layer - 1) * nx;
      const std::int8_t* above = s + static_cast<std::ptrdiff_t>(layer) * nx;
      for (int c = 0; c < nx; ++c) {
        bool agree;
        if (layer == 0) {
          agree = wired && above[c] == 1;
        } else if (layer == ny) {
          agree = wired && below[c] == 1;
        } else {
          agree = below[c] == above[c];
        }
        w[base + c] = static_cast<std::uint8_t>(agree & (word(base + c) < threshold));
      }
    }
  });
}

void label_clusters(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc, LabelWorkspace& ws,
                    ClusterLabels& out) {
  const int nx = d.nx(), ny = d.ny();
  const auto n_sites = static_cast<std::int32_t>(d.num_sites());
  const auto n_h = static_cast<EdgeIndex>(d.num_horizontal_edges());
  ws.parent.resize(static_cast<std::size_t>(n_sites));
  ws.root.resize(static_cast<std::size_t>(n_sites));
  std::int32_t* parent = ws.parent.data();
  const std::uint8_t* bond = omega.bonds.data();

  // Row strips are labeled independently; links never leave a strip, so the
  // strips touch disjoint parts of the forest.
  const bool par = n_sites >= kParallelMinSites;
  const int n_strips = par ? std::max(1, std::min(omp_get_max_threads(), ny)) : 1;
  parallel_for(n_strips, par, [&](int k) {
    const int r0 = static_cast<int>(static_cast<long long>(ny) * k / n_strips);
    const int r1 = static_cast<int>(static_cast<long long>(ny) * (k + 1) / n_strips);
    // Each site links to its west and south neighbours, which were visited
    // before it; a fresh site can then be attached without a second find.
    for (int r = r0; r < r1; ++r) {
      const std::uint8_t* west = bond + r * (nx + 1);
      const std::uint8_t* south = bond + n_h + r * nx;
      for (int c = 0; c < nx; ++c) {
        const std::int32_t site = r * nx + c;
        const bool w = c > 0 && west[c];
        const bool s = r > r0 && south[c];
        if (w) {
          parent[site] = find_root(parent, site - 1);
          if (s) link(parent, site, site - nx);
        } else if (s) {
          parent[site] = find_root(parent, site - nx);
        } else {
          parent[site] = site;
        }
      }
    }
  });
  for (int k = 1; k < n_strips; ++k) {
    const int r = static_cast<int>(static_cast<long long>(ny) * k / n_strips);
    for (int c = 0; c < nx; ++c) {
      if (bond[n_h + r * nx + c]) link(parent, (r - 1) * nx + c, r * nx + c);
    }
  }
  // Under PlusWired every site with an open external edge joins one set.
  std::int32_t anchor = -1;
  if (bc == BoundaryCondition::PlusWired) {
    for (EdgeIndex e : d.external_edges()) {
      if (!bond[e]) continue;
      const std::int32_t site = decode(e, nx, ny, n_h).first;
      if (anchor < 0) {
        anchor = site;
      } else {
        link(parent, anchor, site);
      }
    }
  }

  std::int32_t* root = ws.root.data();
  parallel_for(n_sites, par, [&](std::int32_t i) { root[i] = find_root_readonly(parent, i); });

  out.label.resize(static_cast<std::size_t>(n_sites));
  out.size.clear();
  std::int32_t* label = out.label.data();
  for (std::int32_t i = 0; i < n_sites; ++i) {
    const std::int32_t r = root[i];
    if (r == i) {
      label[i] = static_cast<std::int32_t>(out.size.size());
      out.size.push_back(1);
    } else {
      label[i] = label[r];
      ++out.size[label[i]];
    }
  }
  out.boundary = anchor >= 0 ? label[anchor] : -1;
}

void draw_cluster_signs(const ClusterLabels& labels, double beta_h, const CounterRng& rng, std::uint64_t step,
                        std::vector<std::int8_t>& signs) {
  const auto k = static_cast<std::int32_t>(labels.num_clusters());
  signs.resize(static_cast<std::size_t>(k));
  std::int8_t* out = signs.data();
  const std::int32_t* size = labels.size.data();
  const std::int32_t boundary = labels.boundary;
  parallel_for(k, k >= kParallelMinSites, [&](std::int32_t c) {
    if (c == boundary) {
      out[c] = 1;
    } else {
      const double u = rng.uniform(StreamTag::ClusterSigns, step, static_cast<std::uint32_t>(c));
      out[c] = u < plus_probability(beta_h * size[c]) ? 1 : -1;
    }
  });
}

void assign_spins(const ClusterLabels& labels, std::span<const std::int8_t> signs, SpinConfig& out) {
  const auto n = static_cast<std::int64_t>(labels.label.size());
  out.spins.resize(labels.label.size());
  std::int8_t* s = out.spins.data();
  const std::int32_t* label = labels.label.data();
  parallel_for(n, n >= kParallelMinSites, [&](std::int64_t i) { s[i] = signs[label[i]]; });
}

namespace {

// Row partial sums are formed independently and reduced serially in row order,
// so the result does not depend on the thread count.
template <class Term>
double window_sum(const LatticeDomain& d, int r, const Window& base_x, const Window& base_y, Term term) {
  const int nx = d.nx();
  const int rows_x = base_x.count() > 0 ? base_x.y_hi - base_x.y_lo + 1 : 0;
  const int rows_y = base_y.count() > 0 ? base_y.y_hi - base_y.y_lo + 1 : 0;
  std::vector<double> partial(static_cast<std::size_t>(rows_x + rows_y), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows_x + rows_y; ++i) {
    const bool horizontal = i < rows_x;
    const Window& w = horizontal ? base_x : base_y;
    const int y = w.y_lo + (horizontal ? i : i - rows_x);
    const int shift = horizontal ? r : r * nx;
    double acc = 0.0;
    for (int x = w.x_lo; x <= w.x_hi; ++x) {
      const SiteIndex s = y * nx + x;
      acc += term(s, s + shift);
    }
    partial[i] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

double pair_sum(const LatticeDomain& d, std::span<const double> value, int r, const Window& base_x,
                const Window& base_y) {
  const double* v = value.data();
  return window_sum(d, r, base_x, base_y, [v](SiteIndex s, SiteIndex t) { return v[s] * v[t]; });
}

double connected_pair_count(const LatticeDomain& d, std::span<const std::int32_t> label, int r,
                            const Window& base_x, const Window& base_y) {
  const std::int32_t* l = label.data();
  return window_sum(d, r, base_x, base_y, [l](SiteIndex s, SiteIndex t) { return l[s] == l[t] ? 1.0 : 0.0; });
}

double conditional_pair_sum(const LatticeDomain& d, std::span<const std::int32_t> label,
                            std::span<const double> cluster_mean, int r, const Window& base_x,
                            const Window& base_y) {
  const std::int32_t* l = label.data();
  const double* t = cluster_mean.data();
  return window_sum(d, r, base_x, base_y, [l, t](SiteIndex s, SiteIndex u) {
    const std::int32_t a = l[s], b = l[u];
    return a == b ? 1.0 : t[a] * t[b];
  });
}

void separable_transform(std::span<const double> w, int nx, int ny, std::span<const double> sx, int mx,
                         std::span<const double> sy, int my, std::vector<double>& out) {
  std::vector<double> tmp(static_cast<std::size_t>(mx) * ny);
#pragma omp parallel for collapse(2) schedule(static)
  for (int m = 0; m < mx; ++m)
    for (int y = 0; y < ny; ++y) {
      const double* wr = &w[static_cast<std::size_t>(y) * nx];
      const double* sr = &sx[static_cast<std::size_t>(m) * nx];
      double acc = 0.0;
      for (int x = 0; x < nx; ++x) acc += wr[x] * sr[x];
      tmp[static_cast<std::size_t>(m) * ny + y] = acc;
    }
  out.assign(static_cast<std::size_t>(mx) * my, 0.0);
#pragma omp parallel for collapse(2) schedule(static)
  for (int m = 0; m < mx; ++m)
    for (int n = 0; n < my; ++n) {
      const double* tr = &tmp[static_cast<std::size_t>(m) * ny];
      const double* sr = &sy[static_cast<std::size_t>(n) * ny];
      double acc = 0.0;
      for (int y = 0; y < ny; ++y) acc += tr[y] * sr[y];
      out[static_cast<std::size_t>(m) * my + n] = acc;
    }
}

}  // namespace fkising::kernels
