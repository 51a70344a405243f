#include "fkising/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fkising/error.hpp"
#include "json.hpp"

namespace fkising {

BondConfig sample_bonds_given_spins(const LatticeDomain& d, const SpinConfig& sigma, const SimParams& params,
                                    BoundaryCondition bc, const CounterRng& rng, std::uint64_t step) {
  check_sizes(d, sigma);
  BondConfig out;
  kernels::sample_bonds(d, sigma, params.p(), bc, rng, step, out);
  return out;
}

SpinConfig sample_spins_given_bonds(const LatticeDomain& d, const BondConfig& omega, const SimParams& params,
                                    BoundaryCondition bc, const CounterRng& rng, std::uint64_t step) {
  check_bc(d, omega, bc);
  kernels::LabelWorkspace ws;
  kernels::ClusterLabels labels;
  kernels::label_clusters(d, omega, bc, ws, labels);
  std::vector<std::int8_t> signs;
  kernels::draw_cluster_signs(labels, params.beta_h(), rng, step, signs);
  SpinConfig out;
  kernels::assign_spins(labels, signs, out);
  return out;
}

ChainState sw_field_step(const LatticeDomain& d, const ChainState& state, const SimParams& params,
                         BoundaryCondition bc, const CounterRng& rng, std::uint64_t step) {
  if (!compatible(d, state.sigma, state.omega, bc)) {
    throw Error(ErrorKind::IncompatibleState, "bond configuration is not compatible with the spins");
  }
  ChainState next;
  next.omega = sample_bonds_given_spins(d, state.sigma, params, bc, rng, step);
  next.sigma = sample_spins_given_bonds(d, next.omega, params, bc, rng, step);
  return next;
}

Magnetization magnetization(const SpinConfig& sigma, double a) {
  Magnetization m;
  for (auto s : sigma.spins) m.bare += s;
  m.rescaled = theta(a) * static_cast<double>(m.bare);
  return m;
}

std::string to_json_line(const Record& r) {
  const nlohmann::json j{{"chain_id", r.chain_id},
                         {"sweep", r.sweep},
                         {"bare_mag", r.bare_mag},
                         {"rescaled_mag", r.rescaled_mag},
                         {"n_clusters", r.n_clusters},
                         {"max_cluster", r.max_cluster},
                         {"boundary_cluster_size", r.boundary_cluster_size},
                         {"obs", r.obs}};
  return j.dump();
}

Record parse_record(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Record r;
    r.chain_id = j.at("chain_id").get<std::uint64_t>();
    r.sweep = j.at("sweep").get<std::int64_t>();
    r.bare_mag = j.at("bare_mag").get<long long>();
    r.rescaled_mag = j.at("rescaled_mag").get<double>();
    r.n_clusters = j.at("n_clusters").get<std::int64_t>();
    r.max_cluster = j.at("max_cluster").get<std::int64_t>();
    r.boundary_cluster_size = j.at("boundary_cluster_size").get<std::int64_t>();
    if (j.contains("obs")) r.obs = j.at("obs").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

std::vector<Record> parse_records(const std::string& text) {
  std::vector<Record> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(parse_record(line));
  }
  return out;
}

void sort_records(std::vector<Record>& records) {
  std::stable_sort(records.begin(), records.end(), [](const Record& x, const Record& y) {
    return x.chain_id < y.chain_id || (x.chain_id == y.chain_id && x.sweep < y.sweep);
  });
}

Chain::Chain(LatticeDomain domain, SimParams params, BoundaryCondition bc)
    : domain_(std::move(domain)), params_(params), bc_(bc), rng_(params.seed, params.chain_id) {
  params_.validate();
  sigma_ = SpinConfig::all_plus(domain_);
  omega_ = BondConfig::all_closed(domain_);
  kernels::label_clusters(domain_, omega_, bc_, ws_, labels_);
}

void Chain::sweep() {
  kernels::sample_bonds(domain_, sigma_, params_.p(), bc_, rng_, step_, omega_);
  kernels::label_clusters(domain_, omega_, bc_, ws_, labels_);
  kernels::draw_cluster_signs(labels_, params_.beta_h(), rng_, step_, signs_);
  kernels::assign_spins(labels_, signs_, sigma_);
  ++step_;
}

std::vector<double> Chain::cluster_means() const {
  const double bh = params_.beta_h();
  std::vector<double> t(labels_.num_clusters());
  for (std::size_t c = 0; c < t.size(); ++c) t[c] = std::tanh(bh * labels_.size[c]);
  if (labels_.boundary >= 0) t[labels_.boundary] = 1.0;
  return t;
}

Record Chain::record() const {
  Record r;
  r.chain_id = params_.chain_id;
  r.sweep = steps_done();
  const Magnetization m = magnetization(sigma_, params_.a);
  r.bare_mag = m.bare;
  r.rescaled_mag = m.rescaled;
  r.n_clusters = static_cast<std::int64_t>(labels_.num_clusters());
  r.max_cluster = labels_.size.empty() ? 0 : *std::max_element(labels_.size.begin(), labels_.size.end());
  r.boundary_cluster_size = labels_.boundary >= 0 ? labels_.size[labels_.boundary] : 0;
  return r;
}

ReweightSample ReweightSample::from(const ClusterDecomposition& decomp, double value) {
  ReweightSample s;
  s.value = value;
  s.boundary_size = decomp.boundary_size();
  for (std::size_t c = 0; c < decomp.num_clusters(); ++c) {
    if (!decomp.is_boundary(static_cast<std::int32_t>(c))) s.internal_sizes.push_back(decomp.sizes[c]);
  }
  return s;
}

ReweightResult reweight_to_field(std::span<const ReweightSample> samples, const SimParams& target,
                                 double ess_floor) {
  if (samples.empty()) throw Error(ErrorKind::InsufficientSamples, "no samples to reweight");
  const double bh = target.beta_h();
  std::vector<double> logw(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    double lw = bh * samples[k].boundary_size;
    for (std::int32_t n : samples[k].internal_sizes) lw += log_cosh(bh * n);
    logw[k] = lw;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double sw = 0.0, sw2 = 0.0, swg = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double w = std::exp(logw[k] - top);
    sw += w;
    sw2 += w * w;
    swg += w * samples[k].value;
  }
  ReweightResult r{swg / sw, sw * sw / sw2};
  if (r.ess < ess_floor) {
    throw Error(ErrorKind::DegenerateWeights, "effective sample size " + std::to_string(r.ess) + " below floor");
  }
  return r;
}

}  // namespace fkising
