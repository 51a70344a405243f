#include "fkising/exact.hpp"

#include <cmath>

#include "fkising/error.hpp"
#include "fkising/union_find.hpp"
#include "json.hpp"

namespace fkising {
namespace {

// Neumaier-compensated long double sum.
class Sum {
 public:
  void add(long double v) {
    const long double t = s_ + v;
    c_ += std::fabs(s_) >= std::fabs(v) ? (s_ - t) + v : (v - t) + s_;
    s_ = t;
  }
  long double value() const { return s_ + c_; }

 private:
  long double s_ = 0.0L;
  long double c_ = 0.0L;
};

struct Tables {
  std::vector<EdgeInfo> edges;
  std::vector<bool> counted;  // edge contributes p or (1-p)
};

Tables tables(const LatticeDomain& d, BoundaryCondition bc) {
  Tables t;
  const auto n = static_cast<EdgeIndex>(d.num_edges());
  for (EdgeIndex e = 0; e < n; ++e) {
    t.edges.push_back(d.edge_info(e));
    t.counted.push_back(t.edges.back().internal || bc == BoundaryCondition::PlusWired);
  }
  return t;
}

int spin_of(std::uint64_t bits, SiteIndex s) { return (bits >> s) & 1u ? 1 : -1; }

// Normalize log weights (-inf allowed) into probabilities.
ExactDistribution normalize(ExactDistribution::Kind kind, int n_sites, int n_edges, const std::vector<long double>& lw) {
  long double top = -INFINITY;
  for (long double v : lw) top = std::max(top, v);
  Sum total;
  for (long double v : lw) {
    if (v > -INFINITY) total.add(std::exp(v - top));
  }
  ExactDistribution out;
  out.kind = kind;
  out.n_sites = n_sites;
  out.n_edges = n_edges;
  out.log_z = top + std::log(total.value());
  out.prob.resize(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    out.prob[i] = lw[i] > -INFINITY ? static_cast<double>(std::exp(lw[i] - out.log_z)) : 0.0;
  }
  return out;
}

// log p^{open}(1-p)^{closed} over counted edges; -inf when a free-bc external
// edge is open or a zero-probability factor occurs.
long double bond_log_factor(const Tables& t, std::uint64_t bonds, long double p) {
  long double acc = 0.0L;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    const bool open = (bonds >> e) & 1u;
    if (!t.counted[e]) {
      if (open) return -INFINITY;
      continue;
    }
    const long double q = open ? p : 1.0L - p;
    if (q <= 0.0L) return -INFINITY;
    acc += std::log(q);
  }
  return acc;
}

struct Clusters {
  std::vector<std::int32_t> of;     // site -> canonical cluster id
  std::vector<std::int32_t> sizes;
  std::int32_t boundary = -1;
};

Clusters clusters_of(const LatticeDomain& d, const Tables& t, std::uint64_t bonds, BoundaryCondition bc) {
  const auto n = static_cast<std::int32_t>(d.num_sites());
  UnionFind uf(static_cast<std::size_t>(n) + 1);
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    if (!((bonds >> e) & 1u)) continue;
    const EdgeInfo& info = t.edges[e];
    if (info.internal) {
      uf.unite(info.first, *info.second);
    } else if (bc == BoundaryCondition::PlusWired) {
      uf.unite(info.first, n);
    }
  }
  Clusters c;
  c.of.resize(n);
  std::vector<std::int32_t> id(static_cast<std::size_t>(n) + 1, -1);
  for (std::int32_t s = 0; s < n; ++s) {
    const std::int32_t r = uf.find(s);
    if (id[r] < 0) {
      id[r] = static_cast<std::int32_t>(c.sizes.size());
      c.sizes.push_back(0);
    }
    c.of[s] = id[r];
    ++c.sizes[id[r]];
  }
  if (bc == BoundaryCondition::PlusWired) c.boundary = id[uf.find(n)];
  return c;
}

long double log_cosh_ld(long double x) {
  x = std::fabs(x);
  return x + std::log1p(std::exp(-2.0L * x)) - std::log(2.0L);
}

long double joint_log_weight(const Tables& t, std::uint64_t spins, std::uint64_t bonds, long double p,
                             long double beta_h, int n_sites) {
  long double lw = bond_log_factor(t, bonds, p);
  if (lw == -INFINITY) return lw;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    if (!((bonds >> e) & 1u)) continue;
    const EdgeInfo& info = t.edges[e];
    const int far = info.second ? spin_of(spins, *info.second) : 1;
    if (spin_of(spins, info.first) != far) return -INFINITY;
  }
  long double m = 0.0L;
  for (int s = 0; s < n_sites; ++s) m += spin_of(spins, s);
  return lw + beta_h * m;
}

void check_limit(int value, int limit, const char* what) {
  if (value > limit) {
    throw Error(ErrorKind::DomainTooLarge,
                std::string(what) + " " + std::to_string(value) + " exceeds " + std::to_string(limit));
  }
}

}  // namespace

long double ExactDistribution::z() const { return std::exp(log_z); }

double ExactDistribution::expectation(const std::function<double(std::uint64_t)>& g) const {
  Sum acc;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (prob[i] != 0.0) acc.add(static_cast<long double>(prob[i]) * g(i));
  }
  return static_cast<double>(acc.value());
}

SpinConfig spins_from_bits(const LatticeDomain& d, std::uint64_t bits) {
  SpinConfig s(d.num_sites());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<std::int8_t>(spin_of(bits, static_cast<SiteIndex>(i)));
  return s;
}

BondConfig bonds_from_bits(const LatticeDomain& d, std::uint64_t bits) {
  BondConfig w(d.num_edges());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = (bits >> e) & 1u;
  return w;
}

std::uint64_t spins_to_bits(const SpinConfig& sigma) {
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] == 1) bits |= std::uint64_t{1} << i;
  }
  return bits;
}

std::uint64_t bonds_to_bits(const BondConfig& omega) {
  std::uint64_t bits = 0;
  for (std::size_t e = 0; e < omega.size(); ++e) {
    if (omega[e]) bits |= std::uint64_t{1} << e;
  }
  return bits;
}

ExactDistribution enumerate_ising(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                                  const ExactLimits& limits) {
  const int n = static_cast<int>(d.num_sites());
  check_limit(n, limits.max_sites, "sites");
  const long double beta = params.beta;
  const long double beta_h = static_cast<long double>(params.beta) * params.lattice_field();
  const Tables t = tables(d, bc);
  std::vector<long double> lw(std::size_t{1} << n);
  for (std::uint64_t s = 0; s < lw.size(); ++s) {
    long double acc = 0.0L;
    for (const EdgeInfo& info : t.edges) {
      if (info.internal) {
        acc += beta * spin_of(s, info.first) * spin_of(s, *info.second);
      } else if (bc == BoundaryCondition::PlusWired) {
        acc += beta * spin_of(s, info.first);
      }
    }
    for (int i = 0; i < n; ++i) acc += beta_h * spin_of(s, i);
    lw[s] = acc;
  }
  return normalize(ExactDistribution::Kind::Spins, n, static_cast<int>(t.edges.size()), lw);
}

ExactDistribution enumerate_fk(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                               bool with_field, const ExactLimits& limits) {
  const int m = static_cast<int>(d.num_edges());
  check_limit(m, limits.max_edges, "edges");
  const long double p = -std::expm1(-2.0L * params.beta);
  const long double beta_h = with_field ? static_cast<long double>(params.beta) * params.lattice_field() : 0.0L;
  const Tables t = tables(d, bc);
  std::vector<long double> lw(std::size_t{1} << m);
  for (std::uint64_t w = 0; w < lw.size(); ++w) {
    long double acc = bond_log_factor(t, w, p);
    if (acc > -INFINITY) {
      const Clusters c = clusters_of(d, t, w, bc);
      for (std::size_t k = 0; k < c.sizes.size(); ++k) {
        const long double x = beta_h * c.sizes[k];
        if (static_cast<std::int32_t>(k) == c.boundary) {
          acc += x;
        } else {
          acc += std::log(2.0L) + log_cosh_ld(x);
        }
      }
    }
    lw[w] = acc;
  }
  return normalize(ExactDistribution::Kind::Bonds, static_cast<int>(d.num_sites()), m, lw);
}

ExactDistribution enumerate_joint(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                                  const ExactLimits& limits) {
  const int n = static_cast<int>(d.num_sites());
  const int m = static_cast<int>(d.num_edges());
  check_limit(n + m, limits.max_joint_bits, "joint state bits");
  const long double p = -std::expm1(-2.0L * params.beta);
  const long double beta_h = static_cast<long double>(params.beta) * params.lattice_field();
  const Tables t = tables(d, bc);
  std::vector<long double> lw(std::size_t{1} << (n + m));
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << m); ++w)
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      lw[s | (w << n)] = joint_log_weight(t, s, w, p, beta_h, n);
    }
  return normalize(ExactDistribution::Kind::Joint, n, m, lw);
}

ExactDistribution spin_marginal(const ExactDistribution& joint) {
  if (joint.kind != ExactDistribution::Kind::Joint) throw Error(ErrorKind::InvalidParameter, "not a joint distribution");
  ExactDistribution out;
  out.kind = ExactDistribution::Kind::Spins;
  out.n_sites = joint.n_sites;
  out.n_edges = joint.n_edges;
  out.log_z = joint.log_z;
  const std::uint64_t ns = std::uint64_t{1} << joint.n_sites;
  std::vector<Sum> acc(ns);
  for (std::uint64_t i = 0; i < joint.prob.size(); ++i) acc[i & (ns - 1)].add(joint.prob[i]);
  for (const Sum& s : acc) out.prob.push_back(static_cast<double>(s.value()));
  return out;
}

ExactDistribution bond_marginal(const ExactDistribution& joint) {
  if (joint.kind != ExactDistribution::Kind::Joint) throw Error(ErrorKind::InvalidParameter, "not a joint distribution");
  ExactDistribution out;
  out.kind = ExactDistribution::Kind::Bonds;
  out.n_sites = joint.n_sites;
  out.n_edges = joint.n_edges;
  out.log_z = joint.log_z;
  std::vector<Sum> acc(std::size_t{1} << joint.n_edges);
  for (std::uint64_t i = 0; i < joint.prob.size(); ++i) acc[i >> joint.n_sites].add(joint.prob[i]);
  for (const Sum& s : acc) out.prob.push_back(static_cast<double>(s.value()));
  return out;
}

std::vector<double> exact_conditional_eta(const LatticeDomain& d, const BondConfig& omega, const SimParams& params,
                                          BoundaryCondition bc, const ExactLimits& limits) {
  check_sizes(d, omega);
  const int n = static_cast<int>(d.num_sites());
  check_limit(n, limits.max_sites, "sites");
  check_bc(d, omega, bc);
  const Tables t = tables(d, bc);
  const std::uint64_t w = bonds_to_bits(omega);
  const Clusters c = clusters_of(d, t, w, bc);
  std::vector<SiteIndex> rep(c.sizes.size(), -1);
  for (SiteIndex s = n - 1; s >= 0; --s) rep[c.of[s]] = s;

  const long double p = -std::expm1(-2.0L * params.beta);
  const long double beta_h = static_cast<long double>(params.beta) * params.lattice_field();
  std::vector<long double> lw(std::size_t{1} << n);
  long double top = -INFINITY;
  for (std::uint64_t s = 0; s < lw.size(); ++s) {
    lw[s] = joint_log_weight(t, s, w, p, beta_h, n);
    top = std::max(top, lw[s]);
  }
  if (top == -INFINITY) throw Error(ErrorKind::InvalidBondConfig, "bond configuration has zero weight");
  Sum total;
  std::vector<Sum> plus(c.sizes.size());
  for (std::uint64_t s = 0; s < lw.size(); ++s) {
    if (lw[s] == -INFINITY) continue;
    const long double x = std::exp(lw[s] - top);
    total.add(x);
    for (std::size_t k = 0; k < rep.size(); ++k) {
      if (spin_of(s, rep[k]) == 1) plus[k].add(x);
    }
  }
  std::vector<double> out(c.sizes.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<double>(plus[k].value() / total.value());
  return out;
}

std::string export_oracle(const LatticeDomain& d, const SimParams& params, BoundaryCondition bc,
                          const ExactDistribution& dist) {
  nlohmann::json obs;
  if (dist.kind == ExactDistribution::Kind::Spins || dist.kind == ExactDistribution::Kind::Joint) {
    const ExactDistribution spins = dist.kind == ExactDistribution::Kind::Joint ? spin_marginal(dist) : dist;
    std::vector<double> mean(static_cast<std::size_t>(dist.n_sites));
    for (int i = 0; i < dist.n_sites; ++i) {
      mean[i] = spins.expectation([i](std::uint64_t s) { return spin_of(s, i); });
    }
    obs["site_magnetization"] = mean;
    obs["magnetization"] = spins.expectation([&](std::uint64_t s) {
      double m = 0;
      for (int i = 0; i < dist.n_sites; ++i) m += spin_of(s, i);
      return m;
    });
  }
  if (dist.kind == ExactDistribution::Kind::Bonds || dist.kind == ExactDistribution::Kind::Joint) {
    const ExactDistribution bonds = dist.kind == ExactDistribution::Kind::Joint ? bond_marginal(dist) : dist;
    std::vector<double> open(static_cast<std::size_t>(dist.n_edges));
    for (int e = 0; e < dist.n_edges; ++e) {
      open[e] = bonds.expectation([e](std::uint64_t w) { return static_cast<double>((w >> e) & 1u); });
    }
    obs["edge_open_probability"] = open;
  }
  const Rect& r = d.region();
  const nlohmann::json j{{"domain", {{"a", d.mesh()}, {"rect", {r.x0, r.y0, r.x1, r.y1}}, {"bc", to_string(bc)}}},
                         {"params", {{"beta", params.beta}, {"h", params.h}, {"a", params.a}}},
                         {"bc", to_string(bc)},
                         {"observables", obs},
                         {"Z", static_cast<double>(dist.z())},
                         {"log_Z", static_cast<double>(dist.log_z)}};
  return j.dump(2);
}

}  // namespace fkising
