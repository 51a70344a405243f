#pragma once

#include "fkising/clusters.hpp"
#include "fkising/config.hpp"
#include "fkising/lattice.hpp"
#include "fkising/params.hpp"

namespace fkising {

// beta sum_{E_i} s_x s_y + beta H sum_x s_x, plus beta sum_{E_e} s_x under PlusWired.
double gibbs_log_weight(const LatticeDomain& d, const SpinConfig& sigma, const SimParams& params,
                        BoundaryCondition bc);

// log[p^{1(w)} (1-p)^{0(w)} 2^{C(w)}] with C(w) the number of internal clusters.
// Under Free only internal edges are counted (external edges are fixed closed).
// Throws InvalidBondConfig for an open external edge under Free.
double rc_log_weight(const LatticeDomain& d, const BondConfig& omega, double p, BoundaryCondition bc);

// rc_log_weight at p(beta) + beta H |C_b| + sum_{i != b} log cosh(beta H |C_i|).
double field_fk_log_weight(const LatticeDomain& d, const BondConfig& omega, const SimParams& params,
                           BoundaryCondition bc);

// beta H |C_b| + sum_{i != b} log cosh(beta H |C_i|): the field tilt of an H = 0 FK sample.
double field_log_tilt(const ClusterDecomposition& decomp, double beta_h);

}  // namespace fkising
