#include "fkising/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <sstream>

#include "fkising/error.hpp"

namespace fkising {

namespace pt = boost::property_tree;

namespace {

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v)) throw Error(ErrorKind::ParseError, "bad list entry for " + key + ": '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty list for " + key);
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& value) {
  if (auto child = tree.get_child_optional(key)) {
    try {
      value = child->get_value<T>();
    } catch (const pt::ptree_error&) {
      throw Error(ErrorKind::ParseError, "bad value for " + key);
    }
  }
}

template <class T>
void read_list(const pt::ptree& tree, const std::string& key, std::vector<T>& value) {
  if (auto s = tree.get_optional<std::string>(key)) value = parse_list<T>(*s, key);
}

}  // namespace

SimParams RunConfig::sim_params() const {
  SimParams p;
  p.beta = beta;
  p.h = h;
  p.a = a;
  p.sweeps = sweeps;
  p.burn_in = burn_in;
  p.thin = thin;
  p.seed = seed;
  return p;
}

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
  RunConfig c;
  read(tree, "lattice.a", c.a);
  read(tree, "lattice.L", c.L);
  if (auto bc = tree.get_optional<std::string>("lattice.bc")) {
    try {
      c.bc = parse_boundary_condition(*bc);
    } catch (const Error&) {
      throw Error(ErrorKind::ParseError, "bad boundary condition '" + *bc + "'");
    }
  }
  read(tree, "params.beta", c.beta);
  read(tree, "params.h", c.h);
  read(tree, "params.seed", c.seed);
  read(tree, "params.sweeps", c.sweeps);
  read(tree, "params.burn_in", c.burn_in);
  read(tree, "params.thin", c.thin);
  read(tree, "params.chains", c.chains);
  read_list(tree, "run.r_list", c.r_list);
  read_list(tree, "run.a_list", c.a_list);
  read_list(tree, "run.h_list", c.h_list);
  read_list(tree, "run.eps_list", c.eps_list);
  read(tree, "run.lambda", c.lambda);
  read(tree, "run.alpha", c.alpha);
  read(tree, "run.samples", c.samples);
  read(tree, "run.modes", c.modes);
  read(tree, "tolerances.slope_tol", c.slope_tol);
  read(tree, "tolerances.norm_spread", c.norm_spread);
  read(tree, "tolerances.z_max", c.z_max);
  read(tree, "tolerances.ks_max", c.ks_max);
  read(tree, "tolerances.ks_max_field", c.ks_max_field);
  read(tree, "tolerances.mass_tol", c.mass_tol);
  read(tree, "tolerances.cauchy_min_slope", c.cauchy_min_slope);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[lattice]\na = " << c.a << "\nL = " << c.L << "\nbc = " << to_string(c.bc) << "\n\n";
  os << "[params]\nbeta = " << c.beta << "\nh = " << c.h << "\nseed = " << c.seed << "\nsweeps = " << c.sweeps
     << "\nburn_in = " << c.burn_in << "\nthin = " << c.thin << "\nchains = " << c.chains << "\n\n";
  os << "[run]\nr_list = " << join(c.r_list) << "\na_list = " << join(c.a_list) << "\nh_list = " << join(c.h_list)
     << "\neps_list = " << join(c.eps_list) << "\nlambda = " << c.lambda << "\nalpha = " << c.alpha
     << "\nsamples = " << c.samples << "\nmodes = " << c.modes << "\n\n";
  os << "[tolerances]\nslope_tol = " << c.slope_tol << "\nnorm_spread = " << c.norm_spread << "\nz_max = " << c.z_max
     << "\nks_max = " << c.ks_max << "\nks_max_field = " << c.ks_max_field << "\nmass_tol = " << c.mass_tol
     << "\ncauchy_min_slope = " << c.cauchy_min_slope << "\n";
  return os.str();
}

}  // namespace fkising
