#include "fkising/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fkising/error.hpp"
#include "fkising/kernels.hpp"

namespace fkising {

namespace {
constexpr double kPi = std::numbers::pi;
}

double dirichlet_eigenvalue(const Rect& rect, int m, int n) {
  const double lx = rect.width(), ly = rect.height();
  return kPi * kPi * (double(m) * m / (lx * lx) + double(n) * n / (ly * ly));
}

double EigenPair::operator()(Point p) const {
  const double lx = rect.width(), ly = rect.height();
  return 2.0 / std::sqrt(lx * ly) * std::sin(m * kPi * (p.x - rect.x0) / lx) *
         std::sin(n * kPi * (p.y - rect.y0) / ly);
}

double EigenPair::sup_norm() const { return 2.0 / std::sqrt(rect.area()); }

std::vector<EigenPair> eigen_pairs(const Rect& rect, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidParameter, "eigen_pairs needs count >= 1");
  if (!(rect.width() > 0.0 && rect.height() > 0.0)) throw Error(ErrorKind::EmptyDomain, "degenerate rectangle");
  const double lx = rect.width(), ly = rect.height();
  // Weyl: about area*lambda/(4 pi) eigenvalues below lambda; grow until enough.
  double cap = std::max(4.0 * kPi * static_cast<double>(count) / rect.area(), dirichlet_eigenvalue(rect, 1, 1)) * 1.5;
  std::vector<EigenPair> all;
  for (;;) {
    all.clear();
    const int mmax = static_cast<int>(std::sqrt(cap) * lx / kPi) + 1;
    for (int m = 1; m <= mmax; ++m) {
      const double rem = cap / (kPi * kPi) - double(m) * m / (lx * lx);
      if (rem < 0.0) break;
      const int nmax = static_cast<int>(std::sqrt(rem) * ly) + 1;
      for (int n = 1; n <= nmax; ++n) {
        const double lam = dirichlet_eigenvalue(rect, m, n);
        if (lam <= cap) all.push_back({m, n, lam, rect});
      }
    }
    if (all.size() >= count) break;
    cap *= 2.0;
  }
  std::sort(all.begin(), all.end(), [](const EigenPair& p, const EigenPair& q) {
    if (std::fabs(p.lambda - q.lambda) > 1e-12 * std::max(p.lambda, q.lambda)) return p.lambda < q.lambda;
    return p.m < q.m || (p.m == q.m && p.n < q.n);
  });
  all.resize(count);
  return all;
}

WeylReport weyl_check(std::span<const EigenPair> pairs, double ell) {
  if (pairs.empty() || !(ell < pairs.back().lambda)) {
    throw Error(ErrorKind::TruncationTooSmall, "ell must lie below the largest computed eigenvalue");
  }
  WeylReport r;
  for (const auto& p : pairs) r.count += p.lambda <= ell ? 1 : 0;
  r.predicted = pairs.front().rect.area() * ell / (4.0 * kPi);
  r.relative_deviation = std::fabs(static_cast<double>(r.count) - r.predicted) / r.predicted;
  return r;
}

SupNormReport sup_norm_bound_check(std::span<const EigenPair> pairs) {
  SupNormReport r;
  for (const auto& p : pairs) {
    r.sup_norm = std::max(r.sup_norm, p.sup_norm());
    r.constant = std::max(r.constant, p.sup_norm() * std::pow(p.lambda, -0.25));
  }
  r.holds = true;
  for (const auto& p : pairs) r.holds = r.holds && p.sup_norm() <= r.constant * std::pow(p.lambda, 0.25) * (1 + 1e-12);
  return r;
}

CoefficientVector field_coefficients(std::span<const SignedAtom> field, std::span<const EigenPair> pairs) {
  CoefficientVector c;
  if (pairs.empty()) throw Error(ErrorKind::InvalidParameter, "empty eigenbasis");
  const Rect& rect = pairs.front().rect;
  for (const auto& atom : field) {
    if (!rect.contains(atom.position)) throw Error(ErrorKind::AtomOutsideDomain, "field atom outside rectangle");
    c.total_weight += std::fabs(atom.weight);
  }
  c.area = rect.area();
  c.a.assign(pairs.size(), 0.0);
  c.lambda.resize(pairs.size());
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const auto& atom : field) acc += atom.weight * pairs[i](atom.position);
    c.a[i] = acc;
    c.lambda[i] = pairs[i].lambda;
  }
  for (const auto& p : pairs) c.sup_norm = std::max(c.sup_norm, p.sup_norm());
  return c;
}

CoefficientVector lattice_coefficients(const LatticeDomain& d, std::span<const double> weights, const Rect& rect,
                                       int mx, int my) {
  if (weights.size() != d.num_sites()) throw Error(ErrorKind::InvalidParameter, "weight vector size mismatch");
  if (mx < 1 || my < 1) throw Error(ErrorKind::InvalidParameter, "need at least one mode per direction");
  const int nx = d.nx(), ny = d.ny();
  const double lx = rect.width(), ly = rect.height();
  const double norm = 2.0 / std::sqrt(lx * ly);
  std::vector<double> sx(static_cast<std::size_t>(mx) * nx), sy(static_cast<std::size_t>(my) * ny);
  for (int col = 0; col < nx; ++col) {
    const double x = d.site_position(d.site_at(col, 0)).x;
    if (x < rect.x0 - 1e-12 || x > rect.x1 + 1e-12) throw Error(ErrorKind::AtomOutsideDomain, "site outside rectangle");
    for (int m = 0; m < mx; ++m) sx[static_cast<std::size_t>(m) * nx + col] = norm * std::sin((m + 1) * kPi * (x - rect.x0) / lx);
  }
  for (int row = 0; row < ny; ++row) {
    const double y = d.site_position(d.site_at(0, row)).y;
    if (y < rect.y0 - 1e-12 || y > rect.y1 + 1e-12) throw Error(ErrorKind::AtomOutsideDomain, "site outside rectangle");
    for (int n = 0; n < my; ++n) sy[static_cast<std::size_t>(n) * ny + row] = std::sin((n + 1) * kPi * (y - rect.y0) / ly);
  }
  CoefficientVector c;
  kernels::separable_transform(weights, nx, ny, sx, mx, sy, my, c.a);
  c.lambda.resize(c.a.size());
  for (int m = 0; m < mx; ++m)
    for (int n = 0; n < my; ++n) c.lambda[static_cast<std::size_t>(m) * my + n] = dirichlet_eigenvalue(rect, m + 1, n + 1);
  for (double w : weights) c.total_weight += std::fabs(w);
  c.sup_norm = norm;
  c.area = rect.area();
  return c;
}

double eigen_tail_sum_bound(double area, double cutoff, double alpha) {
  if (alpha <= 1.0) return std::numeric_limits<double>::infinity();
  return alpha * (area / (4.0 * kPi)) * std::pow(cutoff, 1.0 - alpha) / (alpha - 1.0);
}

double weighted_square_sum(const CoefficientVector& coeffs, double alpha) {
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.a.size(); ++i) acc += std::pow(coeffs.lambda[i], -alpha) * coeffs.a[i] * coeffs.a[i];
  return acc;
}

SobolevNorm sobolev_norm(const CoefficientVector& coeffs, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidParameter, "alpha must be positive");
  SobolevNorm r;
  r.norm = std::sqrt(weighted_square_sum(coeffs, alpha));
  r.truncation = coeffs.a.size();
  r.below_three_halves = alpha <= 1.5;
  double lam_max = 0.0;
  for (double l : coeffs.lambda) lam_max = std::max(lam_max, l);
  r.tail_bound = coeffs.area > 0.0 && lam_max > 0.0
                     ? coeffs.sup_norm * coeffs.sup_norm * coeffs.total_weight * coeffs.total_weight *
                           eigen_tail_sum_bound(coeffs.area, lam_max, alpha)
                     : 0.0;
  return r;
}

CauchyDiagnostic cutoff_cauchy_diagnostic(const std::vector<std::vector<double>>& samples,
                                          std::span<const double> epsilons, int n_blocks) {
  if (epsilons.size() < 2) throw Error(ErrorKind::InvalidParameter, "need at least two cutoffs");
  for (std::size_t j = 1; j < epsilons.size(); ++j) {
    if (!(epsilons[j] < epsilons[j - 1])) throw Error(ErrorKind::InvalidParameter, "cutoffs must decrease");
  }
  if (samples.size() < static_cast<std::size_t>(std::max(n_blocks, 2))) {
    throw Error(ErrorKind::InsufficientSamples, "fewer samples than blocks");
  }
  const std::size_t pairs = epsilons.size() - 1;
  for (const auto& row : samples) {
    if (row.size() != pairs) throw Error(ErrorKind::InvalidParameter, "sample row length != number of cutoff pairs");
  }
  const auto blocks = make_blocks(samples, static_cast<std::size_t>(n_blocks));
  const auto jk = jackknife(blocks, [](const std::vector<double>& m) { return m; });
  CauchyDiagnostic diag;
  for (std::size_t j = 0; j < pairs; ++j) {
    diag.rows.push_back({epsilons[j], epsilons[j + 1], jk.full[j], jk.se[j]});
    if (jk.full[j] > 0.0) {
      diag.fit.x.push_back(std::log(epsilons[j]));
      diag.fit.y.push_back(std::log(jk.full[j]));
      diag.fit.y_se.push_back(std::max(jk.se[j] / jk.full[j], 1e-12));
    }
  }
  if (diag.fit.x.size() < 2) throw Error(ErrorKind::InsufficientSamples, "fewer than two nonzero moments");
  const auto f = fit_line(diag.fit.x, diag.fit.y, diag.fit.y_se);
  diag.fit.slope = f.slope;
  diag.fit.intercept = f.intercept;
  diag.fit.slope_se = f.slope_se;
  diag.fit.window_lo = epsilons[pairs - 1];
  diag.fit.window_hi = epsilons[0];
  return diag;
}

std::string norm_csv(double alpha, const SobolevNorm& n) {
  std::ostringstream os;
  os.precision(12);
  os << "alpha,N_truncation,norm,tail_bound\n" << alpha << ',' << n.truncation << ',' << n.norm << ',' << n.tail_bound << '\n';
  return os.str();
}

std::string cauchy_csv(const CauchyDiagnostic& diag) {
  std::ostringstream os;
  os.precision(12);
  os << "eps,eps_prime,second_moment,stderr\n";
  for (const auto& r : diag.rows) os << r.eps << ',' << r.eps_prime << ',' << r.second_moment << ',' << r.stderr_ << '\n';
  return os.str();
}

}  // namespace fkising
