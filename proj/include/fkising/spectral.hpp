#pragma once

#include <span>
#include <string>
#include <vector>

#include "fkising/lattice.hpp"
#include "fkising/metrics.hpp"
#include "fkising/stats.hpp"

namespace fkising {

// Dirichlet eigenpair of -Laplace on a rectangle:
// lambda = pi^2 (m^2/Lx^2 + n^2/Ly^2),
// u(x,y) = 2/sqrt(Lx Ly) sin(m pi (x-x0)/Lx) sin(n pi (y-y0)/Ly).
struct EigenPair {
  int m = 1;
  int n = 1;
  double lambda = 0.0;
  Rect rect;

  double operator()(Point p) const;
  double sup_norm() const;
};

double dirichlet_eigenvalue(const Rect& rect, int m, int n);

// The N smallest eigenpairs, ascending; eigenvalues equal to within a relative
// 1e-12 are ordered by (m, n).
std::vector<EigenPair> eigen_pairs(const Rect& rect, std::size_t count);

struct WeylReport {
  std::size_t count = 0;
  double predicted = 0.0;
  double relative_deviation = 0.0;
};

// count = #{lambda_i <= ell}, predicted = area ell / (4 pi). Throws
// TruncationTooSmall unless ell is below the largest computed eigenvalue.
WeylReport weyl_check(std::span<const EigenPair> pairs, double ell);

struct SupNormReport {
  double sup_norm = 0.0;  // max_i ||u_i||_inf
  double constant = 0.0;  // smallest c with ||u_i||_inf <= c lambda_i^{1/4} for all i
  bool holds = false;
};
SupNormReport sup_norm_bound_check(std::span<const EigenPair> pairs);

struct SignedAtom {
  Point position;
  double weight = 0.0;  // signed
};

struct CoefficientVector {
  std::vector<double> a;
  std::vector<double> lambda;
  double sup_norm = 0.0;      // max ||u_i||_inf over the basis
  double total_weight = 0.0;  // sum |w| of the field atoms
  double area = 0.0;
};

// a_i = sum w u_i(x). Throws AtomOutsideDomain.
CoefficientVector field_coefficients(std::span<const SignedAtom> field, std::span<const EigenPair> pairs);

// Coefficients of a lattice field on the (m, n) <= (mx, my) block of the
// eigenbasis of `rect`, via a separable sine transform. Site weights are
// row-major over the domain.
CoefficientVector lattice_coefficients(const LatticeDomain& d, std::span<const double> weights, const Rect& rect,
                                       int mx, int my);

// Tail bound sum_{lambda_i >= cutoff} lambda_i^{-alpha} <= alpha (A/4pi) cutoff^{1-alpha} / (alpha-1),
// from the counting bound N(lambda) <= A lambda / (4 pi). Infinite for alpha <= 1.
double eigen_tail_sum_bound(double area, double cutoff, double alpha);

struct SobolevNorm {
  double norm = 0.0;
  double tail_bound = 0.0;  // bound on the omitted part of the squared norm
  std::size_t truncation = 0;
  bool below_three_halves = false;
};

// sqrt(sum_i lambda_i^{-alpha} a_i^2) with the tail bound
// ||u||_inf^2 (sum |w|)^2 * eigen_tail_sum_bound(area, lambda_max, alpha).
SobolevNorm sobolev_norm(const CoefficientVector& coeffs, double alpha);

// sum_i lambda_i^{-alpha} a_i^2 over the block returned by lattice_coefficients.
double weighted_square_sum(const CoefficientVector& coeffs, double alpha);

struct CauchyRow {
  double eps = 0.0;
  double eps_prime = 0.0;
  double second_moment = 0.0;
  double stderr_ = 0.0;
};

struct CauchyDiagnostic {
  std::vector<CauchyRow> rows;
  ExponentFit fit;  // log second moment vs log eps
};

// samples[k][j]: squared H^{-alpha} norm of Phi_{eps_{j+1}} - Phi_{eps_j} in
// sample k, for a decreasing epsilon list. Throws InsufficientSamples.
CauchyDiagnostic cutoff_cauchy_diagnostic(const std::vector<std::vector<double>>& samples,
                                          std::span<const double> epsilons, int n_blocks = 20);

std::string norm_csv(double alpha, const SobolevNorm& n);
std::string cauchy_csv(const CauchyDiagnostic& diag);

}  // namespace fkising
