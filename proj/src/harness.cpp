#include "fkising/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <sstream>

#include "fkising/clusters.hpp"
#include "fkising/error.hpp"
#include "fkising/loops.hpp"
#include "fkising/metrics.hpp"
#include "json.hpp"

namespace fkising {

std::vector<Record> run_chains(const RunSpec& spec, const ObserverFactory& factory) {
  if (spec.chains < 1) throw Error(ErrorKind::InvalidParameter, "need at least one chain");
  spec.params.validate();
  std::vector<std::vector<Record>> per(spec.chains);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < spec.chains; ++k) {
    try {
      SimParams p = spec.params;
      p.chain_id += static_cast<std::uint64_t>(k);
      Chain chain(spec.domain, p, spec.bc);
      Observer observe = factory ? factory() : Observer{};
      for (std::int64_t i = 0; i < p.burn_in; ++i) chain.sweep();
      per[k].reserve(static_cast<std::size_t>(p.sweeps / p.thin));
      for (std::int64_t i = 0; i < p.sweeps; ++i) {
        chain.sweep();
        if ((i + 1) % p.thin != 0) continue;
        Record r = chain.record();
        if (observe) observe(chain, r);
        per[k].push_back(std::move(r));
      }
    } catch (...) {
#pragma omp critical(fkising_run_chains)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<Record> out;
  for (auto& v : per) std::move(v.begin(), v.end(), std::back_inserter(out));
  sort_records(out);
  return out;
}

std::pair<kernels::Window, kernels::Window> pair_windows(const PairRegion& g, int r) {
  kernels::Window wx{g.x_lo, g.fixed_base ? g.x_hi : g.x_hi - r, g.y_lo, g.y_hi};
  kernels::Window wy{g.x_lo, g.x_hi, g.y_lo, g.fixed_base ? g.y_hi : g.y_hi - r};
  return {wx, wy};
}

PairRegion central_region(const LatticeDomain& d, int half_width) {
  const int cx = (d.nx() - 1) / 2, cy = (d.ny() - 1) / 2;
  return {cx - half_width, cx + half_width, cy - half_width, cy + half_width, true};
}

namespace {

std::vector<std::vector<double>> obs_rows(const std::vector<Record>& records) {
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(r.obs);
  return rows;
}

void check_region(const LatticeDomain& d, const PairRegion& g, const std::vector<int>& r_list) {
  for (int r : r_list) {
    if (r < 1) throw Error(ErrorKind::InvalidParameter, "separations must be positive");
    const auto [wx, wy] = pair_windows(g, r);
    if (wx.count() == 0 || wy.count() == 0) throw Error(ErrorKind::InvalidParameter, "empty pair window");
    if (wx.x_lo < 0 || wx.y_lo < 0 || wx.x_hi + r >= d.nx() || wx.y_hi >= d.ny() || wy.y_hi + r >= d.ny() ||
        wy.x_hi >= d.nx()) {
      throw Error(ErrorKind::InvalidParameter, "pair window leaves the domain at r=" + std::to_string(r));
    }
  }
}

// Summed-area table over the site grid.
struct AreaTable {
  int nx = 0, ny = 0;
  std::vector<double> s;

  void build(std::span<const double> v, int nx_, int ny_) {
    nx = nx_;
    ny = ny_;
    s.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
    for (int y = 0; y < ny; ++y) {
      double row = 0.0;
      for (int x = 0; x < nx; ++x) {
        row += v[static_cast<std::size_t>(y) * nx + x];
        s[static_cast<std::size_t>(y + 1) * (nx + 1) + x + 1] = s[static_cast<std::size_t>(y) * (nx + 1) + x + 1] + row;
      }
    }
  }
  double at(int x, int y) const { return s[static_cast<std::size_t>(y) * (nx + 1) + x]; }
  double mean(const kernels::Window& w, int dx, int dy) const {
    const int x0 = w.x_lo + dx, x1 = w.x_hi + dx + 1, y0 = w.y_lo + dy, y1 = w.y_hi + dy + 1;
    return (at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0)) / w.count();
  }
};

// Unweighted log-log slope; used inside jackknife replicates.
LinearFit log_fit(const std::vector<double>& x, const std::vector<double>& y) { return fit_line(x, y); }

}  // namespace

// ---- two-point ------------------------------------------------------------

ObserverFactory two_point_observer(const PairRegion& region, std::vector<int> r_list) {
  return [region, r_list]() -> Observer {
    std::vector<double> spins;
    return [region, r_list, spins](const Chain& chain, Record& rec) mutable {
      const auto& d = chain.domain();
      spins.resize(d.num_sites());
      for (std::size_t s = 0; s < spins.size(); ++s) spins[s] = chain.spins()[s];
      rec.obs.clear();
      for (int r : r_list) {
        const auto [wx, wy] = pair_windows(region, r);
        const double n = wx.count() + wy.count();
        rec.obs.push_back(kernels::connected_pair_count(d, chain.labels().label, r, wx, wy) / n);
        rec.obs.push_back(kernels::pair_sum(d, spins, r, wx, wy) / n);
      }
    };
  };
}

TwoPointResult two_point_from_records(const std::vector<Record>& records, const std::vector<int>& r_list,
                                      std::size_t n_blocks, double slope_se_cap) {
  if (r_list.size() < 3) throw Error(ErrorKind::InvalidParameter, "need at least three separations");
  const auto blocks = make_blocks(obs_rows(records), n_blocks);
  if (blocks.total.size() != 2 * r_list.size()) throw Error(ErrorKind::InvalidParameter, "record layout mismatch");
  const auto jk = jackknife(blocks, [](const std::vector<double>& m) { return m; });
  TwoPointResult out;
  out.r = r_list;
  std::vector<double> lx;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    out.connectivity.push_back({jk.full[2 * i], jk.se[2 * i]});
    out.spin.push_back({jk.full[2 * i + 1], jk.se[2 * i + 1]});
    if (!(jk.full[2 * i] > 0.0)) {
      throw Error(ErrorKind::InsufficientStatistics, "non-positive correlation at r=" + std::to_string(r_list[i]));
    }
    lx.push_back(std::log(static_cast<double>(r_list[i])));
  }
  const std::size_t n = r_list.size();
  const auto slope_of = [&](const std::vector<double>& m) {
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) ly[i] = std::log(std::max(m[2 * i], 1e-300));
    const auto f = log_fit(lx, ly);
    return std::vector<double>{f.slope, f.intercept};
  };
  const auto sj = jackknife(blocks, slope_of);
  out.fit.x = lx;
  for (std::size_t i = 0; i < n; ++i) {
    out.fit.y.push_back(std::log(jk.full[2 * i]));
    out.fit.y_se.push_back(jk.se[2 * i] / jk.full[2 * i]);
  }
  out.fit.slope = sj.full[0];
  out.fit.intercept = sj.full[1];
  out.fit.slope_se = sj.se[0];
  out.fit.window_lo = r_list.front();
  out.fit.window_hi = r_list.back();
  if (!std::isfinite(out.fit.slope_se) || out.fit.slope_se > slope_se_cap) {
    throw Error(ErrorKind::InsufficientStatistics, "slope standard error above cap");
  }
  return out;
}

TwoPointResult estimate_critical_2pt(const TwoPointRun& run, std::vector<Record>* records) {
  RunSpec spec;
  spec.domain = build_box(run.a, run.L);
  spec.bc = BoundaryCondition::Free;
  spec.params.beta = run.beta;
  spec.params.h = 0.0;
  spec.params.a = run.a;
  spec.params.sweeps = std::max<std::int64_t>(1, run.sweeps / run.chains);
  spec.params.burn_in = run.burn_in;
  spec.params.seed = run.seed;
  spec.chains = run.chains;
  const PairRegion region = central_region(spec.domain, run.L / 8);
  check_region(spec.domain, region, run.r_list);
  auto recs = run_chains(spec, two_point_observer(region, run.r_list));
  auto out = two_point_from_records(recs, run.r_list, 20, run.slope_se_cap);
  if (records) *records = std::move(recs);
  return out;
}

// ---- normalization ----------------------------------------------------------

ObserverFactory normalization_observer() {
  return []() -> Observer {
    return [](const Chain& chain, Record& rec) {
      const double a = chain.params().a;
      const double th = theta(a);
      double sq = 0.0;
      for (auto s : chain.labels().size) sq += static_cast<double>(s) * s;
      const double bare = static_cast<double>(rec.bare_mag);
      rec.obs = {rec.rescaled_mag * rec.rescaled_mag, th * th * sq, a * a * a * a * bare * bare};
    };
  };
}

NormalizationRow normalization_from_records(const std::vector<Record>& records, double a, std::size_t n_blocks) {
  const auto blocks = make_blocks(obs_rows(records), n_blocks);
  if (blocks.total.size() != 3) throw Error(ErrorKind::InvalidParameter, "record layout mismatch");
  const auto jk = jackknife(blocks, [](const std::vector<double>& m) { return m; });
  NormalizationRow row;
  row.a = a;
  row.spin = {jk.full[0], jk.se[0]};
  row.fk = {jk.full[1], jk.se[1]};
  row.control = {jk.full[2], jk.se[2]};
  const double comb = std::hypot(row.spin.se, row.fk.se);
  row.z_score = comb > 0.0 ? std::fabs(row.spin.value - row.fk.value) / comb : 0.0;
  return row;
}

std::vector<NormalizationRow> second_moment_normalization(const NormalizationRun& run) {
  std::vector<NormalizationRow> rows;
  for (std::size_t i = 0; i < run.a_list.size(); ++i) {
    const double a = run.a_list[i];
    RunSpec spec;
    spec.domain = build_domain(a, Rect{0.0, 0.0, 1.0, 1.0});
    spec.params.a = a;
    spec.params.sweeps = std::max<std::int64_t>(1, run.sweeps / run.chains);
    spec.params.burn_in = run.burn_in;
    spec.params.seed = run.seed;
    spec.params.chain_id = 1000 * i;
    spec.chains = run.chains;
    rows.push_back(normalization_from_records(run_chains(spec, normalization_observer()), a));
  }
  return rows;
}

// ---- truncated correlations ----------------------------------------------------

ObserverFactory truncated_observer(const PairRegion& region, std::vector<int> r_list) {
  return [region, r_list]() -> Observer {
    std::vector<double> tsite;
    AreaTable table;
    return [region, r_list, tsite, table](const Chain& chain, Record& rec) mutable {
      const auto& d = chain.domain();
      const auto means = chain.cluster_means();
      const auto& label = chain.labels().label;
      tsite.resize(label.size());
      for (std::size_t s = 0; s < label.size(); ++s) tsite[s] = means[label[s]];
      table.build(tsite, d.nx(), d.ny());
      rec.obs.clear();
      for (int r : r_list) {
        const auto [wx, wy] = pair_windows(region, r);
        const double n = wx.count() + wy.count();
        rec.obs.push_back(kernels::conditional_pair_sum(d, label, means, r, wx, wy) / n);
        rec.obs.push_back(table.mean(wx, 0, 0));
        rec.obs.push_back(table.mean(wx, r, 0));
        rec.obs.push_back(table.mean(wy, 0, 0));
        rec.obs.push_back(table.mean(wy, 0, r));
      }
    };
  };
}

namespace {

std::vector<double> truncated_values(const std::vector<double>& m) {
  std::vector<double> g(m.size() / 5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double* v = &m[5 * i];
    g[i] = v[0] - 0.5 * (v[1] * v[2] + v[3] * v[4]);
  }
  return g;
}

}  // namespace

std::vector<TruncatedCorrelationEstimate> truncated_from_records(const std::vector<Record>& records,
                                                                 const std::vector<int>& r_list, double h, double a,
                                                                 int L, std::size_t n_blocks) {
  const auto blocks = make_blocks(obs_rows(records), n_blocks);
  if (blocks.total.size() != 5 * r_list.size()) throw Error(ErrorKind::InvalidParameter, "record layout mismatch");
  const auto jk = jackknife(blocks, truncated_values);
  std::vector<TruncatedCorrelationEstimate> out;
  for (std::size_t i = 0; i < r_list.size(); ++i) {
    if (!std::isfinite(jk.corrected[i])) throw Error(ErrorKind::InsufficientStatistics, "non-finite estimate");
    out.push_back({r_list[i], jk.corrected[i], jk.se[i], h, a, L});
  }
  return out;
}

namespace {

RunSpec truncated_spec(const TruncatedRun& run) {
  RunSpec spec;
  spec.domain = build_box(run.a, run.L);
  spec.bc = run.bc;
  spec.params.beta = run.beta;
  spec.params.h = run.h;
  spec.params.a = run.a;
  spec.params.sweeps = std::max<std::int64_t>(1, run.sweeps / run.chains);
  spec.params.burn_in = run.burn_in;
  spec.params.seed = run.seed;
  spec.chains = run.chains;
  return spec;
}

PairRegion quarter_region(int L) { return {L / 4, L - L / 4, L / 4, L - L / 4, false}; }

}  // namespace

std::vector<TruncatedCorrelationEstimate> truncated_2pt(const TruncatedRun& run, std::vector<Record>* records) {
  const auto r_list = run.r_list.empty() ? default_tail_r_list(run.L / 8) : run.r_list;
  const RunSpec spec = truncated_spec(run);
  const PairRegion region = quarter_region(run.L);
  check_region(spec.domain, region, r_list);
  auto recs = run_chains(spec, truncated_observer(region, r_list));
  auto out = truncated_from_records(recs, r_list, run.h, run.a, run.L);
  if (records) *records = std::move(recs);
  return out;
}

std::vector<int> default_tail_r_list(int r_max) {
  std::vector<int> r;
  for (int i = 1; i <= std::min(16, r_max); ++i) r.push_back(i);
  for (int i = 18; i <= r_max; i += 2) r.push_back(i);
  return r;
}

namespace {

struct TailWindow {
  std::vector<std::size_t> idx;
  double lo = 0.0, hi = 0.0;
};

double tail_rate(const std::vector<double>& g, const std::vector<int>& r_list, const std::vector<double>& sigma_log,
                 const std::vector<std::size_t>& idx) {
  std::vector<double> x, y, s;
  for (std::size_t i : idx) {
    if (!(g[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    x.push_back(r_list[i]);
    y.push_back(std::log(g[i]) + 0.25 * std::log(static_cast<double>(r_list[i])));
    s.push_back(sigma_log[i]);
  }
  return -fit_line(x, y, s).slope;
}

}  // namespace

MassEstimate mass_from_records(const std::vector<Record>& records, const std::vector<int>& r_list, double h, double a,
                               std::size_t n_blocks) {
  const auto blocks = make_blocks(obs_rows(records), n_blocks);
  if (blocks.total.size() != 5 * r_list.size()) throw Error(ErrorKind::InvalidParameter, "record layout mismatch");
  const auto jk = jackknife(blocks, truncated_values);
  const auto& g = jk.full;
  std::vector<double> sigma_log(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sigma_log[i] = g[i] > 0.0 ? std::max(jk.se[i] / g[i], 1e-12) : 1.0;

  const double r_max = r_list.back();
  auto select = [&](double lo, double hi) {
    TailWindow w{{}, lo, hi};
    for (std::size_t i = 0; i < r_list.size(); ++i)
      if (r_list[i] >= lo - 1e-9 && r_list[i] <= hi + 1e-9) w.idx.push_back(i);
    return w;
  };
  // Start from the positive part of the whole range, then iterate the window.
  TailWindow w;
  for (std::size_t i = 0; i < r_list.size() && g[i] > 0.0; ++i) w.idx.push_back(i);
  if (w.idx.size() < 3) throw Error(ErrorKind::InsufficientStatistics, "fewer than three positive correlations");
  double m = tail_rate(g, r_list, sigma_log, w.idx);
  for (int it = 0; it < 50; ++it) {
    if (!(m > 0.0)) throw Error(ErrorKind::InsufficientStatistics, "no exponential decay detected");
    const double lo = std::max(1.0 / m, static_cast<double>(r_list.front()));
    const double hi = 4.0 / m;
    if (hi > r_max) {
      throw Error(ErrorKind::CorrelationLengthTooLarge,
                  "tail window [1/m,4/m] = [" + std::to_string(1.0 / m) + "," + std::to_string(hi) +
                      "] exceeds r_max " + std::to_string(r_max));
    }
    TailWindow next = select(lo, hi);
    if (next.idx.size() < 3) throw Error(ErrorKind::CorrelationLengthTooLarge, "fewer than three points in window");
    const bool same = next.idx == w.idx;
    w = next;
    m = tail_rate(g, r_list, sigma_log, w.idx);
    if (same) break;
  }
  if (!std::isfinite(m)) throw Error(ErrorKind::InsufficientStatistics, "non-positive correlation inside the window");
  double mean = 0.0;
  std::vector<double> reps;
  for (std::size_t k = 0; k < blocks.num_blocks(); ++k) {
    const double mk = tail_rate(truncated_values(blocks.mean_without(k)), r_list, sigma_log, w.idx);
    if (!std::isfinite(mk)) throw Error(ErrorKind::InsufficientStatistics, "jackknife replicate left the positive range");
    reps.push_back(mk);
    mean += mk;
  }
  mean /= static_cast<double>(reps.size());
  double ss = 0.0;
  for (double v : reps) ss += (v - mean) * (v - mean);
  const double b = static_cast<double>(reps.size());
  MassEstimate est;
  est.h = h;
  est.mass = m / a;
  est.se = std::sqrt((b - 1.0) / b * ss) / a;
  est.window_lo = w.lo;
  est.window_hi = w.hi;
  est.points = w.idx.size();
  return est;
}

MassFit fit_mass_from(std::vector<MassEstimate> per_h) {
  if (per_h.size() < 3) throw Error(ErrorKind::InsufficientStatistics, "need at least three field values");
  MassFit out;
  std::sort(per_h.begin(), per_h.end(), [](const MassEstimate& p, const MassEstimate& q) { return p.h < q.h; });
  for (const auto& e : per_h) {
    out.fit.x.push_back(std::log(e.h));
    out.fit.y.push_back(std::log(e.mass));
    out.fit.y_se.push_back(std::max(e.se / e.mass, 1e-12));
  }
  const auto f = fit_line(out.fit.x, out.fit.y, out.fit.y_se);
  out.fit.slope = f.slope;
  out.fit.intercept = f.intercept;
  out.fit.slope_se = f.slope_se;
  out.fit.window_lo = per_h.front().h;
  out.fit.window_hi = per_h.back().h;
  out.per_h = std::move(per_h);
  return out;
}

MassFit fit_mass(const MassRun& run) {
  std::vector<MassEstimate> per_h;
  for (std::size_t i = 0; i < run.h_list.size(); ++i) {
    TruncatedRun tr;
    tr.L = run.L;
    tr.a = run.a;
    tr.h = run.h_list[i];
    tr.r_list = run.r_list.empty() ? default_tail_r_list(run.L / 4) : run.r_list;
    tr.sweeps = run.sweeps;
    tr.burn_in = run.burn_in;
    tr.seed = run.seed + 7919 * i;
    tr.chains = run.chains;
    std::vector<Record> recs;
    truncated_2pt(tr, &recs);
    per_h.push_back(mass_from_records(recs, tr.r_list, tr.h, tr.a));
  }
  return fit_mass_from(std::move(per_h));
}

// ---- scaling covariance -------------------------------------------------------

ScalingResult scaling_covariance_test(const ScalingRun& run) {
  const double scaled_side = run.lambda * run.L;
  if (!(run.lambda > 0.0) || std::fabs(scaled_side - std::round(scaled_side)) > 1e-9 || scaled_side < 1.0) {
    throw Error(ErrorKind::IncompatibleLambda, "lambda * L must be a positive integer");
  }
  ScalingResult out;
  out.h_base = run.h;
  out.h_scaled = run.h * std::pow(run.lambda, -15.0 / 8.0);
  auto sample = [&](int side, double h, std::uint64_t chain_id) {
    RunSpec spec;
    spec.domain = build_box(run.a, side);
    spec.bc = run.bc;
    spec.params.h = h;
    spec.params.a = run.a;
    spec.params.sweeps = run.samples * run.thin;
    spec.params.thin = run.thin;
    spec.params.burn_in = run.burn_in;
    spec.params.seed = run.seed;
    spec.params.chain_id = chain_id;
    std::vector<double> m;
    for (const auto& r : run_chains(spec, {})) m.push_back(r.rescaled_mag);
    return m;
  };
  out.base = sample(run.L, out.h_base, 0);
  out.scaled = sample(static_cast<int>(std::lround(scaled_side)), out.h_scaled, 1);
  const double f = std::pow(run.lambda, -15.0 / 8.0);
  for (double& v : out.scaled) v *= f;
  out.ks = ks_two_sample(out.base, out.scaled);
  return out;
}

// ---- free vs wired ------------------------------------------------------------

LoopSummary loop_summary(const LatticeDomain& d, const BondConfig& omega, double side, bool with_loops) {
  LoopSummary s;
  const auto decomp = find_clusters(d, omega, BoundaryCondition::Free);
  const auto diam = cluster_diameters(d, decomp);
  s.largest_cluster_diameter = diam.empty() ? 0.0 : *std::max_element(diam.begin(), diam.end());
  if (!with_loops) return s;
  for (const auto& loop : trace_loops(d, omega)) {
    const double dm = cluster_diameter(loop.vertices);
    s.largest_loop_diameter = std::max(s.largest_loop_diameter, dm);
    if (dm > side / 8.0) s.big_loops += 1.0;
  }
  return s;
}

FreeWiredResult free_vs_wired_loops(const FreeWiredRun& run) {
  if (run.L < 2) throw Error(ErrorKind::InvalidParameter, "need L >= 2");
  const double side = run.L * run.a;
  FreeWiredResult out;
  auto collect = [&](BoundaryCondition bc, std::uint64_t chain_id) {
    RunSpec spec;
    spec.domain = build_box(run.a, bc == BoundaryCondition::Free ? run.L : run.L - 1);
    spec.bc = bc;
    spec.params.beta = run.beta;
    spec.params.a = run.a;
    spec.params.sweeps = run.samples * run.thin;
    spec.params.thin = run.thin;
    spec.params.burn_in = run.burn_in;
    spec.params.seed = run.seed;
    spec.params.chain_id = chain_id;
    std::vector<LoopSummary> sums;
    const bool loops = run.loops;
    auto factory = [&sums, bc, side, loops]() -> Observer {
      return [&sums, bc, side, loops](const Chain& chain, Record&) {
        if (bc == BoundaryCondition::Free) {
          sums.push_back(loop_summary(chain.domain(), chain.bonds(), side, loops));
        } else {
          const DualConfig dual = wired_dual(chain.domain(), chain.bonds());
          sums.push_back(loop_summary(dual.domain, dual.omega, side, loops));
        }
      };
    };
    run_chains(spec, factory);
    return sums;
  };
  out.free_side = collect(BoundaryCondition::Free, 0);
  out.wired_side = collect(BoundaryCondition::PlusWired, 1);
  auto column = [](const std::vector<LoopSummary>& v, double LoopSummary::*field) {
    std::vector<double> c;
    for (const auto& s : v) c.push_back(s.*field);
    return c;
  };
  out.cluster_diameter = ks_two_sample(column(out.free_side, &LoopSummary::largest_cluster_diameter),
                                       column(out.wired_side, &LoopSummary::largest_cluster_diameter));
  if (run.loops) {
    out.loop_diameter = ks_two_sample(column(out.free_side, &LoopSummary::largest_loop_diameter),
                                      column(out.wired_side, &LoopSummary::largest_loop_diameter));
    out.big_loop_count = ks_two_sample(column(out.free_side, &LoopSummary::big_loops),
                                       column(out.wired_side, &LoopSummary::big_loops));
  }
  return out;
}

// ---- covariance decay ----------------------------------------------------------

namespace {

bool overlaps(const Rect& p, const Rect& q) {
  return std::min(p.x1, q.x1) > std::max(p.x0, q.x0) && std::min(p.y1, q.y1) > std::max(p.y0, q.y0);
}

// Sites of d inside r, as (col range, row range).
kernels::Window site_window(const LatticeDomain& d, const Rect& r) {
  const double a = d.mesh();
  const Point o = d.site_position(0);
  kernels::Window w;
  w.x_lo = std::max(0, static_cast<int>(std::ceil((r.x0 - o.x) / a - 1e-9)));
  w.x_hi = std::min(d.nx() - 1, static_cast<int>(std::floor((r.x1 - o.x) / a + 1e-9)));
  w.y_lo = std::max(0, static_cast<int>(std::ceil((r.y0 - o.y) / a - 1e-9)));
  w.y_hi = std::min(d.ny() - 1, static_cast<int>(std::floor((r.y1 - o.y) / a + 1e-9)));
  return w;
}

}  // namespace

CovarianceDecay covariance_decay_field(const CovarianceRun& run) {
  if (run.u_list.size() < 3) throw Error(ErrorKind::InvalidParameter, "need at least three translations");
  RunSpec spec;
  spec.domain = build_box(run.a, run.L);
  spec.bc = BoundaryCondition::PlusWired;
  spec.params.h = run.h;
  spec.params.a = run.a;
  spec.params.sweeps = run.sweeps;
  spec.params.burn_in = run.burn_in;
  spec.params.seed = run.seed;
  const LatticeDomain& d = spec.domain;
  const kernels::Window wf = site_window(d, run.f);
  if (wf.count() == 0) throw Error(ErrorKind::InvalidParameter, "f covers no site");
  std::vector<kernels::Window> wg;
  for (double u : run.u_list) {
    const Rect gu = run.g.translated(u, 0.0);
    if (overlaps(run.f, gu)) throw Error(ErrorKind::InvalidParameter, "supports of f and T^u g overlap");
    if (!d.region().contains({gu.x0, gu.y0}) || !d.region().contains({gu.x1, gu.y1})) {
      throw Error(ErrorKind::InvalidParameter, "T^u g leaves the domain");
    }
    wg.push_back(site_window(d, gu));
    if (wg.back().count() == 0) throw Error(ErrorKind::InvalidParameter, "T^u g covers no site");
  }
  const double th = theta(run.a);
  auto factory = [&]() -> Observer {
    std::vector<double> cf, cg;
    return [&, cf, cg](const Chain& chain, Record& rec) mutable {
      const auto& label = chain.labels().label;
      const auto t = chain.cluster_means();
      const std::size_t k = t.size();
      auto count = [&](const kernels::Window& w, std::vector<double>& c) {
        c.assign(k, 0.0);
        for (int y = w.y_lo; y <= w.y_hi; ++y)
          for (int x = w.x_lo; x <= w.x_hi; ++x) c[label[d.site_at(x, y)]] += 1.0;
      };
      count(wf, cf);
      double pf = 0.0;
      for (std::size_t c = 0; c < k; ++c) pf += t[c] * cf[c];
      rec.obs.clear();
      for (const auto& w : wg) {
        count(w, cg);
        double pg = 0.0, same = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          pg += t[c] * cg[c];
          same += cf[c] * cg[c] * (1.0 - t[c] * t[c]);
        }
        rec.obs.push_back(th * th * (same + pf * pg));
        rec.obs.push_back(th * pf);
        rec.obs.push_back(th * pg);
      }
    };
  };
  const auto records = run_chains(spec, factory);
  const auto blocks = make_blocks(obs_rows(records), 20);
  auto cov_of = [](const std::vector<double>& m) {
    std::vector<double> c(m.size() / 3);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = m[3 * i] - m[3 * i + 1] * m[3 * i + 2];
    return c;
  };
  const auto jk = jackknife(blocks, cov_of);
  CovarianceDecay out;
  for (std::size_t i = 0; i < run.u_list.size(); ++i) out.rows.push_back({run.u_list[i], jk.corrected[i], jk.se[i]});
  auto rate_of = [&](const std::vector<double>& c) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!(c[i] > 0.0)) continue;
      x.push_back(run.u_list[i]);
      y.push_back(std::log(c[i]) + 0.25 * std::log(run.u_list[i]));
    }
    if (x.size() < 2) return std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
    return std::vector<double>{-fit_line(x, y).slope};
  };
  const auto rj = jackknife(blocks, [&](const std::vector<double>& m) { return rate_of(cov_of(m)); });
  out.rate = rj.full[0];
  out.rate_se = rj.se[0];
  if (!std::isfinite(out.rate)) throw Error(ErrorKind::InsufficientStatistics, "covariances not resolved");
  return out;
}

// ---- cutoff Cauchy ----------------------------------------------------------------

CauchyResult cutoff_cauchy_run(const CauchyRun& run) {
  RunSpec spec;
  spec.domain = build_box(run.a, run.L);
  spec.params.a = run.a;
  spec.params.sweeps = run.samples * run.thin;
  spec.params.thin = run.thin;
  spec.params.burn_in = run.burn_in;
  spec.params.seed = run.seed;
  const LatticeDomain& d = spec.domain;
  const Rect rect = d.region();
  const std::size_t bands = run.epsilons.size() - 1;
  std::vector<std::vector<double>> samples;
  std::vector<double> tail_sum(bands, 0.0);
  auto factory = [&]() -> Observer {
    std::vector<double> w;
    std::vector<std::int8_t> signs;
    return [&, w, signs](const Chain& chain, Record&) mutable {
      const auto decomp = chain.decomposition();
      const auto diam = cluster_diameters(d, decomp);
      signs.resize(decomp.num_clusters());
      for (std::size_t c = 0; c < signs.size(); ++c) signs[c] = chain.spins()[decomp.sites(static_cast<std::int32_t>(c))[0]];
      std::vector<double> row(bands);
      for (std::size_t j = 0; j < bands; ++j) {
        band_weights(decomp, diam, signs, run.a, run.epsilons[j + 1], run.epsilons[j], w);
        const auto coeffs = lattice_coefficients(d, w, rect, run.modes, run.modes);
        row[j] = weighted_square_sum(coeffs, run.alpha);
        tail_sum[j] += sobolev_norm(coeffs, run.alpha).tail_bound;
      }
      samples.push_back(std::move(row));
    };
  };
  run_chains(spec, factory);
  CauchyResult out;
  out.diag = cutoff_cauchy_diagnostic(samples, run.epsilons, run.n_blocks);
  for (std::size_t j = 0; j < bands; ++j) {
    const double mean_tail = tail_sum[j] / static_cast<double>(samples.size());
    if (out.diag.rows[j].second_moment > 0.0) {
      out.max_tail_ratio = std::max(out.max_tail_ratio, mean_tail / out.diag.rows[j].second_moment);
    }
  }
  return out;
}

// ---- mesh diagnostic -----------------------------------------------------------------

namespace {

struct LargeCollections {
  std::vector<PointSet> clusters;
  std::vector<FiniteMeasure2D> measures;
  std::vector<PolyLoop> loops;
};

LargeCollections large_collections(double a, const MeshDiagnosticRun& run, std::uint64_t chain_id) {
  SimParams p;
  p.a = a;
  p.seed = run.seed;
  p.chain_id = chain_id;
  p.burn_in = run.burn_in;
  Chain chain(build_domain(a, Rect{0.0, 0.0, 1.0, 1.0}), p, BoundaryCondition::Free);
  for (std::int64_t i = 0; i < run.burn_in + 1; ++i) chain.sweep();
  const LatticeDomain& d = chain.domain();
  const auto decomp = chain.decomposition();
  const auto measures = rescaled_measures(d, decomp);
  const double cell = run.grid > 0.0 ? run.grid : run.epsilon / 8.0;
  LargeCollections out;
  std::vector<char> large(decomp.num_clusters(), 0);
  for (const auto& m : measures) {
    if (!(m.diameter > run.epsilon)) continue;
    large[m.cluster_id] = 1;
    out.clusters.push_back(m.atoms);
    std::map<std::pair<long, long>, double> cells;
    for (const Point& q : m.atoms) cells[{std::lround(std::floor(q.x / cell)), std::lround(std::floor(q.y / cell))}] += m.weight;
    FiniteMeasure2D fm;
    for (const auto& [key, w] : cells) fm.atoms.push_back({{(key.first + 0.5) * cell, (key.second + 0.5) * cell}, w});
    out.measures.push_back(std::move(fm));
  }
  for (const auto& loop : trace_loops(d, chain.bonds())) {
    if (!loop.outer() || loop.cluster < 0 || !large[loop.cluster]) continue;
    const std::size_t stride = (loop.vertices.size() + run.max_loop_vertices - 1) / run.max_loop_vertices;
    PolyLoop pl;
    for (std::size_t i = 0; i < loop.vertices.size(); i += std::max<std::size_t>(stride, 1)) pl.vertices.push_back(loop.vertices[i]);
    if (pl.vertices.size() >= 3) out.loops.push_back(std::move(pl));
  }
  return out;
}

}  // namespace

MeshDiagnosticRow mesh_diagnostic(const MeshDiagnosticRun& run) {
  const auto coarse = large_collections(run.a, run, 0);
  const auto fine = large_collections(run.a / 2.0, run, 1);
  MeshDiagnosticRow row;
  row.a = run.a;
  row.a_half = run.a / 2.0;
  row.epsilon_cutoff = run.epsilon;
  row.n_clusters_large = coarse.clusters.size() + fine.clusters.size();
  row.d_cl = cluster_collection_distance(coarse.clusters, fine.clusters);
  row.d_meas = measure_collection_distance(coarse.measures, fine.measures);
  row.d_le = loop_ensemble_distance(coarse.loops, fine.loops);
  return row;
}

// ---- reporting ------------------------------------------------------------------

std::string summary_json(const std::vector<SummaryEntry>& entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    arr.push_back({{"test_name", e.test_name},
                   {"target", e.target},
                   {"estimate", e.estimate},
                   {"stderr", e.stderr_},
                   {"pass", e.pass}});
  }
  return arr.dump(2) + "\n";
}

namespace {
std::ostringstream csv_stream() {
  std::ostringstream os;
  os.precision(12);
  return os;
}
}  // namespace

std::string two_point_csv(const TwoPointResult& r) {
  auto os = csv_stream();
  os << "r,connectivity,connectivity_se,spin,spin_se\n";
  for (std::size_t i = 0; i < r.r.size(); ++i) {
    os << r.r[i] << ',' << r.connectivity[i].value << ',' << r.connectivity[i].se << ',' << r.spin[i].value << ','
       << r.spin[i].se << '\n';
  }
  return os.str();
}

std::string normalization_csv(const std::vector<NormalizationRow>& rows) {
  auto os = csv_stream();
  os << "a,spin,spin_se,fk,fk_se,control,control_se,z\n";
  for (const auto& r : rows) {
    os << r.a << ',' << r.spin.value << ',' << r.spin.se << ',' << r.fk.value << ',' << r.fk.se << ','
       << r.control.value << ',' << r.control.se << ',' << r.z_score << '\n';
  }
  return os.str();
}

std::string truncated_csv(const std::vector<TruncatedCorrelationEstimate>& rows) {
  auto os = csv_stream();
  os << "r,value,se,h,a,L\n";
  for (const auto& r : rows) os << r.r << ',' << r.value << ',' << r.se << ',' << r.h << ',' << r.a << ',' << r.L << '\n';
  return os.str();
}

std::string mass_csv(const MassFit& fit) {
  auto os = csv_stream();
  os << "h,mass,se,window_lo,window_hi,points\n";
  for (const auto& e : fit.per_h) {
    os << e.h << ',' << e.mass << ',' << e.se << ',' << e.window_lo << ',' << e.window_hi << ',' << e.points << '\n';
  }
  return os.str();
}

std::string scaling_csv(const ScalingResult& r) {
  auto os = csv_stream();
  os << "h_base,h_scaled,n_base,n_scaled,ks,p_value\n";
  os << r.h_base << ',' << r.h_scaled << ',' << r.base.size() << ',' << r.scaled.size() << ',' << r.ks.statistic << ','
     << r.ks.p_value << '\n';
  return os.str();
}

std::string free_wired_csv(const FreeWiredResult& r) {
  auto os = csv_stream();
  os << "statistic,ks,p_value,n_free,n_wired\n";
  os << "largest_cluster_diameter," << r.cluster_diameter.statistic << ',' << r.cluster_diameter.p_value << ','
     << r.free_side.size() << ',' << r.wired_side.size() << '\n';
  if (r.loop_diameter.n1 > 0) {
    os << "largest_loop_diameter," << r.loop_diameter.statistic << ',' << r.loop_diameter.p_value << ','
       << r.free_side.size() << ',' << r.wired_side.size() << '\n';
    os << "big_loop_count," << r.big_loop_count.statistic << ',' << r.big_loop_count.p_value << ','
       << r.free_side.size() << ',' << r.wired_side.size() << '\n';
  }
  return os.str();
}

std::string covariance_csv(const CovarianceDecay& c) {
  auto os = csv_stream();
  os << "u,cov,se\n";
  for (const auto& r : c.rows) os << r.u << ',' << r.cov << ',' << r.se << '\n';
  return os.str();
}

}  // namespace fkising
