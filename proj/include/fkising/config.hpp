#pragma once

#include <cstdint>
#include <vector>

#include "fkising/lattice.hpp"

namespace fkising {

// sigma_x in {-1,+1} for every site of a LatticeDomain. Under PlusWired the
// boundary sites carry +1 implicitly and are not stored.
struct SpinConfig {
  std::vector<std::int8_t> spins;

  SpinConfig() = default;
  explicit SpinConfig(std::size_t n, std::int8_t value = 1) : spins(n, value) {}
  static SpinConfig all_plus(const LatticeDomain& d) { return SpinConfig(d.num_sites(), 1); }

  std::size_t size() const { return spins.size(); }
  std::int8_t operator[](std::size_t s) const { return spins[s]; }
  std::int8_t& operator[](std::size_t s) { return spins[s]; }
  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
};

// omega(e) in {0,1} over E = E_i u E_e, indexed by LatticeDomain edge index.
struct BondConfig {
  std::vector<std::uint8_t> bonds;

  BondConfig() = default;
  explicit BondConfig(std::size_t n, std::uint8_t value = 0) : bonds(n, value) {}
  static BondConfig all_closed(const LatticeDomain& d) { return BondConfig(d.num_edges(), 0); }

  std::size_t size() const { return bonds.size(); }
  bool open(EdgeIndex e) const { return bonds[static_cast<std::size_t>(e)] != 0; }
  std::uint8_t operator[](std::size_t e) const { return bonds[e]; }
  std::uint8_t& operator[](std::size_t e) { return bonds[e]; }
  friend bool operator==(const BondConfig&, const BondConfig&) = default;
};

// Spin seen across edge e from `first`: the neighbor's spin, or +1 for a
// plus-boundary site.
inline int far_spin(const SpinConfig& sigma, const EdgeInfo& info) {
  return info.second ? sigma[static_cast<std::size_t>(*info.second)] : 1;
}

void check_sizes(const LatticeDomain& d, const SpinConfig& sigma);
void check_sizes(const LatticeDomain& d, const BondConfig& omega);

// Throws InvalidBondConfig when a free-bc configuration has an open external edge.
void check_bc(const LatticeDomain& d, const BondConfig& omega, BoundaryCondition bc);

// omega ~ sigma: every open edge joins equal spins (boundary spins are +1 under PlusWired).
bool compatible(const LatticeDomain& d, const SpinConfig& sigma, const BondConfig& omega, BoundaryCondition bc);

}  // namespace fkising
