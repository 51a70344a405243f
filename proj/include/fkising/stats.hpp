#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fkising {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Mean and naive standard error of i.i.d. values.
Estimate mean_se(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double chi2 = 0.0;
  std::size_t n = 0;
};

// Least squares y = intercept + slope x. With sigma given, a weighted fit with
// errors from the weights; otherwise errors from the residual variance.
LinearFit fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma = {});

struct ExponentFit {
  std::vector<double> x;     // log abscissae
  std::vector<double> y;     // log ordinates
  std::vector<double> y_se;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Contiguous blocks of equal-length rows: per-block sums and counts.
struct BlockData {
  std::vector<std::vector<double>> sums;
  std::vector<std::size_t> counts;
  std::vector<double> total;
  std::size_t n = 0;

  std::vector<double> mean() const;
  std::vector<double> mean_without(std::size_t block) const;
  std::size_t num_blocks() const { return sums.size(); }
};

BlockData make_blocks(const std::vector<std::vector<double>>& rows, std::size_t n_blocks);

struct JackknifeResult {
  std::vector<double> full;       // f(mean of all rows)
  std::vector<double> corrected;  // B f_full - (B-1) mean_i f_(i)
  std::vector<double> se;
  std::vector<std::vector<double>> replicates;
};

// Delete-one-block jackknife of a vector-valued function of the column means.
JackknifeResult jackknife(const BlockData& blocks,
                          const std::function<std::vector<double>(const std::vector<double>&)>& f);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

double chi_square_sf(double statistic, double dof);

// Integrated autocorrelation time with Sokal's self-consistent window (c = 6).
double integrated_autocorrelation_time(std::span<const double> series);

}  // namespace fkising
