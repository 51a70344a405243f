#include "fkising/params.hpp"

#include <cmath>

#include "fkising/error.hpp"
#include "fkising/lattice.hpp"

namespace fkising {

void SimParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidParameter, "beta must be >= 0");
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorKind::InvalidParameter, "a must be > 0");
  if (h < 0.0) throw Error(ErrorKind::InvalidParameter, "negative field h is not supported");
  if (!std::isfinite(h)) throw Error(ErrorKind::InvalidParameter, "h must be finite");
  if (lattice_field() > std::pow(a, -15.0 / 8.0)) throw Error(ErrorKind::InvalidParameter, "H exceeds a^{-15/8}");
  if (sweeps < 1) throw Error(ErrorKind::InvalidParameter, "sweeps must be >= 1");
  if (burn_in < 0) throw Error(ErrorKind::InvalidParameter, "burn_in must be >= 0");
  if (thin < 1) throw Error(ErrorKind::InvalidParameter, "thin must be >= 1");
}

double SimParams::lattice_field() const { return h * theta(a); }

}  // namespace fkising
