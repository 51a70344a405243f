#include "fkising/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "fkising/error.hpp"

namespace fkising {

Estimate mean_se(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InsufficientSamples, "no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InsufficientSamples, "fit needs >= 2 points");
  const bool weighted = !sigma.empty();
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  LinearFit f;
  f.n = x.size();
  f.slope = (s * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.chi2 += weighted ? r * r / (sigma[i] * sigma[i]) : r * r;
  }
  const double scale = weighted ? 1.0 : (x.size() > 2 ? f.chi2 / static_cast<double>(x.size() - 2) : 0.0);
  f.slope_se = std::sqrt(scale * s / det);
  f.intercept_se = std::sqrt(scale * sxx / det);
  return f;
}

std::vector<double> BlockData::mean() const {
  std::vector<double> m(total.size());
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = total[j] / static_cast<double>(n);
  return m;
}

std::vector<double> BlockData::mean_without(std::size_t block) const {
  std::vector<double> m(total.size());
  const double cnt = static_cast<double>(n - counts[block]);
  for (std::size_t j = 0; j < m.size(); ++j) m[j] = (total[j] - sums[block][j]) / cnt;
  return m;
}

BlockData make_blocks(const std::vector<std::vector<double>>& rows, std::size_t n_blocks) {
  if (n_blocks < 2 || rows.size() < n_blocks) {
    throw Error(ErrorKind::InsufficientSamples, "need at least as many rows as jackknife blocks");
  }
  const std::size_t width = rows.front().size();
  BlockData b;
  b.n = rows.size();
  b.sums.assign(n_blocks, std::vector<double>(width, 0.0));
  b.counts.assign(n_blocks, 0);
  b.total.assign(width, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) throw Error(ErrorKind::InvalidParameter, "ragged observation rows");
    const std::size_t k = i * n_blocks / rows.size();
    ++b.counts[k];
    for (std::size_t j = 0; j < width; ++j) {
      b.sums[k][j] += rows[i][j];
      b.total[j] += rows[i][j];
    }
  }
  return b;
}

JackknifeResult jackknife(const BlockData& blocks,
                          const std::function<std::vector<double>(const std::vector<double>&)>& f) {
  JackknifeResult r;
  r.full = f(blocks.mean());
  const std::size_t nb = blocks.num_blocks();
  for (std::size_t k = 0; k < nb; ++k) r.replicates.push_back(f(blocks.mean_without(k)));
  const std::size_t width = r.full.size();
  r.corrected.assign(width, 0.0);
  r.se.assign(width, 0.0);
  const double b = static_cast<double>(nb);
  for (std::size_t j = 0; j < width; ++j) {
    double avg = 0.0;
    for (const auto& rep : r.replicates) avg += rep[j];
    avg /= b;
    double ss = 0.0;
    for (const auto& rep : r.replicates) ss += (rep[j] - avg) * (rep[j] - avg);
    r.se[j] = std::sqrt((b - 1.0) / b * ss);
    r.corrected[j] = b * r.full[j] - (b - 1.0) * avg;
  }
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InsufficientSamples, "KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  KsResult r;
  r.n1 = a.size();
  r.n2 = b.size();
  std::size_t i = 0, j = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    r.statistic = std::max(r.statistic, std::fabs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * r.statistic);
  return r;
}

double chi_square_sf(double statistic, double dof) {
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

double integrated_autocorrelation_time(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) throw Error(ErrorKind::InsufficientSamples, "series too short");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 2; ++t) {
    double c = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) c += (series[i] - mean) * (series[i + t] - mean);
    c /= static_cast<double>(n - t);
    tau += c / c0;
    if (static_cast<double>(t) >= 6.0 * tau) break;
  }
  return std::max(tau, 0.5);
}

}  // namespace fkising
