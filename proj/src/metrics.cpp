#include "fkising/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "fkising/error.hpp"

namespace fkising {

double FiniteMeasure2D::total_mass() const {
  double m = 0.0;
  for (const Atom& a : atoms) m += a.weight;
  return m;
}

namespace {

// Discrete Frechet distance between the closed vertex sequences
// a[0..n-1],a[0] and b[s..],b[s] with both endpoints coupled.
double frechet_from(const std::vector<Point>& a, const std::vector<Point>& b, std::size_t shift,
                    std::vector<double>& prev, std::vector<double>& cur) {
  const std::size_t n = a.size() + 1, m = b.size() + 1;
  const auto bp = [&](std::size_t j) -> const Point& { return b[(shift + j) % b.size()]; };
  const auto ap = [&](std::size_t i) -> const Point& { return a[i % a.size()]; };
  prev.assign(m, 0.0);
  cur.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(ap(i), bp(j));
      double best;
      if (i == 0 && j == 0) {
        best = d;
      } else if (i == 0) {
        best = std::max(cur[j - 1], d);
      } else if (j == 0) {
        best = std::max(prev[0], d);
      } else {
        best = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      }
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

template <class T, class Dist>
double hausdorff_over(std::span<const T> s1, std::span<const T> s2, Dist dist) {
  const auto directed = [&](std::span<const T> x, std::span<const T> y) {
    double worst = 0.0;
    for (const T& u : x) {
      double best = std::numeric_limits<double>::infinity();
      for (const T& v : y) {
        best = std::min(best, dist(u, v));
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(s1, s2), directed(s2, s1));
}

// Dinic max-flow on the bipartite network source -> mu atoms -> nu atoms -> sink.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_edge(int u, int v, double cap) {
    to_.push_back(v), cap_.push_back(cap), next_.push_back(head_[u]), head_[u] = static_cast<int>(to_.size()) - 1;
    to_.push_back(u), cap_.push_back(0.0), next_.push_back(head_[v]), head_[v] = static_cast<int>(to_.size()) - 1;
  }

  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      while (true) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= kTiny) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  static constexpr double kTiny = 1e-300;

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[u]; e >= 0; e = next_[e]) {
        if (cap_[e] > kTiny && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[u] + 1;
          q.push(to_[e]);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int u, int t, double f) {
    if (u == t) return f;
    for (int& e = it_[u]; e >= 0; e = next_[e]) {
      const int v = to_[e];
      if (cap_[e] > kTiny && level_[v] == level_[u] + 1) {
        const double d = dfs(v, t, std::min(f, cap_[e]));
        if (d > kTiny) {
          cap_[e] -= d;
          cap_[e ^ 1] += d;
          return d;
        }
      }
    }
    return 0.0;
  }

  std::vector<int> head_, level_, it_;
  std::vector<int> to_, next_;
  std::vector<double> cap_;
};

// max(mu(X), nu(Y)) - maxflow: the larger of the two worst-case deficiencies
// sup_A mu(A) - nu(A^t) and sup_B nu(B) - mu(B^t).
double deficiency(const FiniteMeasure2D& mu, const FiniteMeasure2D& nu, const std::vector<double>& dist, double t) {
  const int n = static_cast<int>(mu.atoms.size()), m = static_cast<int>(nu.atoms.size());
  MaxFlow g(n + m + 2);
  const int s = n + m, sink = n + m + 1;
  for (int i = 0; i < n; ++i) g.add_edge(s, i, mu.atoms[i].weight);
  for (int j = 0; j < m; ++j) g.add_edge(n + j, sink, nu.atoms[j].weight);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      if (dist[static_cast<std::size_t>(i) * m + j] <= t) g.add_edge(i, n + j, std::numeric_limits<double>::infinity());
    }
  const double flow = g.run(s, sink);
  return std::max(0.0, std::max(mu.total_mass(), nu.total_mass()) - flow);
}

}  // namespace

double loop_distance(const PolyLoop& l1, const PolyLoop& l2) {
  if (l1.vertices.size() < 3 || l2.vertices.size() < 3) throw Error(ErrorKind::DegenerateLoop, "loop needs 3 vertices");
  std::vector<double> prev, cur;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < l2.vertices.size(); ++s) {
    // The coupling starts by pairing the two start vertices, a cheap lower bound.
    if (distance(l1.vertices[0], l2.vertices[s]) >= best) continue;
    best = std::min(best, frechet_from(l1.vertices, l2.vertices, s, prev, cur));
  }
  return best;
}

double loop_ensemble_distance(std::span<const PolyLoop> f1, std::span<const PolyLoop> f2) {
  if (f1.empty() || f2.empty()) throw Error(ErrorKind::EmptyEnsemble, "loop ensemble is empty");
  return hausdorff_over(f1, f2, [](const PolyLoop& a, const PolyLoop& b) { return loop_distance(a, b); });
}

double hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyCluster, "Hausdorff distance of an empty set");
  return hausdorff_over(std::span<const Point>(a), std::span<const Point>(b),
                        [](const Point& p, const Point& q) { return distance(p, q); });
}

double cluster_collection_distance(std::span<const PointSet> s1, std::span<const PointSet> s2) {
  if (s1.empty() || s2.empty()) throw Error(ErrorKind::EmptyCollection, "cluster collection is empty");
  return hausdorff_over(s1, s2, [](const PointSet& a, const PointSet& b) { return hausdorff(a, b); });
}

double prokhorov_distance(const FiniteMeasure2D& mu, const FiniteMeasure2D& nu) {
  for (const auto* m : {&mu, &nu})
    for (const Atom& a : m->atoms) {
      if (!(a.weight >= 0.0)) throw Error(ErrorKind::InvalidParameter, "negative atom weight");
    }
  const std::size_t n = mu.atoms.size(), m = nu.atoms.size();
  std::vector<double> dist(n * m);
  std::vector<double> cand{0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      dist[i * m + j] = distance(mu.atoms[i].position, nu.atoms[j].position);
      cand.push_back(dist[i * m + j]);
    }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  // The deficiency G is a nonincreasing step function, constant on [t_k, t_{k+1}),
  // so eps* = min_k max(t_k, G(t_k)). Find the first k with t_k >= G(t_k).
  std::size_t lo = 0, hi = cand.size() - 1;
  const double g_last = deficiency(mu, nu, dist, cand[hi]);
  if (cand[hi] < g_last) return g_last;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cand[mid] >= deficiency(mu, nu, dist, cand[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  double best = std::max(cand[lo], deficiency(mu, nu, dist, cand[lo]));
  if (lo > 0) best = std::min(best, std::max(cand[lo - 1], deficiency(mu, nu, dist, cand[lo - 1])));
  return best;
}

double measure_collection_distance(std::span<const FiniteMeasure2D> s1, std::span<const FiniteMeasure2D> s2) {
  if (s1.empty() || s2.empty()) throw Error(ErrorKind::EmptyCollection, "measure collection is empty");
  return hausdorff_over(s1, s2, [](const FiniteMeasure2D& a, const FiniteMeasure2D& b) {
    return prokhorov_distance(a, b);
  });
}

std::string diagnostic_csv(std::span<const MeshDiagnosticRow> rows) {
  std::ostringstream os;
  os.precision(10);
  os << "a,a_half,d_cl,d_meas,d_LE,n_clusters_large,epsilon_cutoff\n";
  for (const auto& r : rows) {
    os << r.a << ',' << r.a_half << ',' << r.d_cl << ',' << r.d_meas << ',' << r.d_le << ',' << r.n_clusters_large
       << ',' << r.epsilon_cutoff << '\n';
  }
  return os.str();
}

}  // namespace fkising
