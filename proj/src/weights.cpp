#include "fkising/weights.hpp"

#include <cmath>

#include "fkising/error.hpp"

namespace fkising {

double gibbs_log_weight(const LatticeDomain& d, const SpinConfig& sigma, const SimParams& params,
                        BoundaryCondition bc) {
  check_sizes(d, sigma);
  long long bonds = 0;
  for (EdgeIndex e : d.internal_edges()) {
    const EdgeInfo info = d.edge_info(e);
    bonds += sigma[static_cast<std::size_t>(info.first)] * sigma[static_cast<std::size_t>(*info.second)];
  }
  if (bc == BoundaryCondition::PlusWired) {
    for (EdgeIndex e : d.external_edges()) bonds += sigma[static_cast<std::size_t>(d.edge_info(e).first)];
  }
  long long mag = 0;
  for (auto s : sigma.spins) mag += s;
  return params.beta * static_cast<double>(bonds) + params.beta_h() * static_cast<double>(mag);
}

namespace {

double rc_part(const LatticeDomain& d, const BondConfig& omega, double p, BoundaryCondition bc,
               const ClusterDecomposition& decomp) {
  std::size_t open = 0, closed = 0;
  const auto count = [&](EdgeIndex e) { omega.open(e) ? ++open : ++closed; };
  for (EdgeIndex e : d.internal_edges()) count(e);
  if (bc == BoundaryCondition::PlusWired) {
    for (EdgeIndex e : d.external_edges()) count(e);
  }
  const auto term = [](std::size_t n, double q) { return n == 0 ? 0.0 : static_cast<double>(n) * std::log(q); };
  return term(open, p) + term(closed, 1.0 - p) + static_cast<double>(decomp.num_internal()) * std::log(2.0);
}

}  // namespace

double rc_log_weight(const LatticeDomain& d, const BondConfig& omega, double p, BoundaryCondition bc) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidParameter, "p must lie in [0,1]");
  const auto decomp = find_clusters(d, omega, bc);
  return rc_part(d, omega, p, bc, decomp);
}

double field_log_tilt(const ClusterDecomposition& decomp, double beta_h) {
  double acc = 0.0;
  for (std::size_t c = 0; c < decomp.num_clusters(); ++c) {
    const double t = beta_h * decomp.sizes[c];
    acc += decomp.is_boundary(static_cast<std::int32_t>(c)) ? t : log_cosh(t);
  }
  return acc;
}

double field_fk_log_weight(const LatticeDomain& d, const BondConfig& omega, const SimParams& params,
                           BoundaryCondition bc) {
  const auto decomp = find_clusters(d, omega, bc);
  return rc_part(d, omega, params.p(), bc, decomp) + field_log_tilt(decomp, params.beta_h());
}

}  // namespace fkising
