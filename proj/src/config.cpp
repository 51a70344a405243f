#include "fkising/config.hpp"

#include "fkising/error.hpp"

namespace fkising {

void check_sizes(const LatticeDomain& d, const SpinConfig& sigma) {
  if (sigma.size() != d.num_sites()) {
    throw Error(ErrorKind::InvalidParameter, "spin configuration does not match the domain");
  }
}

void check_sizes(const LatticeDomain& d, const BondConfig& omega) {
  if (omega.size() != d.num_edges()) {
    throw Error(ErrorKind::InvalidBondConfig, "bond configuration does not match the domain");
  }
}

void check_bc(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc) {
  check_sizes(d, omega);
  if (bc != BoundaryCondition::Free) return;
  for (EdgeIndex e : d.external_edges()) {
    if (omega.open(e)) throw Error(ErrorKind::InvalidBondConfig, "open external edge under free bc");
  }
}

bool compatible(const LatticeDomain& d, const SpinConfig& sigma, const BondConfig& omega, BoundaryCondition bc) {
  check_sizes(d, sigma);
  check_sizes(d, omega);
  const auto n = static_cast<EdgeIndex>(d.num_edges());
  for (EdgeIndex e = 0; e < n; ++e) {
    if (!omega.open(e)) continue;
    const EdgeInfo info = d.edge_info(e);
    if (!info.internal && bc == BoundaryCondition::Free) return false;
    if (sigma[static_cast<std::size_t>(info.first)] != far_spin(sigma, info)) return false;
  }
  return true;
}

}  // namespace fkising
