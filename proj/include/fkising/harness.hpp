#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fkising/kernels.hpp"
#include "fkising/lattice.hpp"
#include "fkising/params.hpp"
#include "fkising/sampler.hpp"
#include "fkising/spectral.hpp"
#include "fkising/stats.hpp"

namespace fkising {

// ---- chain runner -------------------------------------------------------

// Fills Record::obs for the current chain state.
using Observer = std::function<void(const Chain&, Record&)>;
// One observer per chain, so observers may own scratch space.
using ObserverFactory = std::function<Observer()>;

struct RunSpec {
  LatticeDomain domain;
  BoundaryCondition bc = BoundaryCondition::Free;
  SimParams params;  // sweeps, burn_in and thin are per chain
  int chains = 1;
};

// Runs `chains` independent chains (chain ids params.chain_id + k) in
// parallel. Each performs burn_in sweeps, then `sweeps` sweeps of which every
// thin-th is recorded. Records come back sorted by (chain_id, sweep).
std::vector<Record> run_chains(const RunSpec& spec, const ObserverFactory& factory);

// Base windows for pair measurements at separation r inside `region`
// (inclusive column/row bounds). With fixed_base the base window is the whole
// region and partners may leave it; otherwise the base shrinks by r so that
// both points stay inside.
struct PairRegion {
  int x_lo = 0, x_hi = -1, y_lo = 0, y_hi = -1;
  bool fixed_base = false;
};
std::pair<kernels::Window, kernels::Window> pair_windows(const PairRegion& region, int r);

// Square of sites with the given half-width around the domain center, fixed base.
PairRegion central_region(const LatticeDomain& d, int half_width);

// ---- critical two-point function -----------------------------------------

// obs = [P(x <-> x+r), mean sigma_x sigma_{x+r}] for each r.
ObserverFactory two_point_observer(const PairRegion& region, std::vector<int> r_list);

struct TwoPointResult {
  std::vector<int> r;
  std::vector<Estimate> connectivity;
  std::vector<Estimate> spin;
  ExponentFit fit;  // log connectivity vs log r
};

// Throws InsufficientStatistics when a correlation is not positive or the
// slope error exceeds slope_se_cap.
TwoPointResult two_point_from_records(const std::vector<Record>& records, const std::vector<int>& r_list,
                                      std::size_t n_blocks = 20, double slope_se_cap = 1.0);

struct TwoPointRun {
  int L = 512;
  double a = 1.0 / 512;
  std::vector<int> r_list{4, 6, 8, 11, 16, 23, 32};
  std::int64_t sweeps = 100000;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
  int chains = 1;
  double beta = kBetaCritical;
  double slope_se_cap = 1.0;
};
TwoPointResult estimate_critical_2pt(const TwoPointRun& run, std::vector<Record>* records = nullptr);

// ---- second-moment normalization ------------------------------------------

// obs = [M^2, Theta^2 sum_C |C|^2, a^4 (sum sigma)^2].
ObserverFactory normalization_observer();

struct NormalizationRow {
  double a = 0.0;
  Estimate spin;     // E[(M^a)^2]
  Estimate fk;       // Theta^2 E[sum |C|^2]
  Estimate control;  // a^4 E[(sum sigma)^2]
  double z_score = 0.0;  // |spin - fk| / sqrt(se_spin^2 + se_fk^2)
};
NormalizationRow normalization_from_records(const std::vector<Record>& records, double a, std::size_t n_blocks = 20);

struct NormalizationRun {
  std::vector<double> a_list{1.0 / 64, 1.0 / 128, 1.0 / 256};
  std::int64_t sweeps = 10000;
  std::int64_t burn_in = 100;
  std::uint64_t seed = 1;
  int chains = 1;
};
std::vector<NormalizationRow> second_moment_normalization(const NormalizationRun& run);

// ---- truncated correlations and mass ----------------------------------------

struct TruncatedCorrelationEstimate {
  int r = 0;
  double value = 0.0;
  double se = 0.0;
  double h = 0.0;
  double a = 0.0;
  int L = 0;
};

// obs per r: [mean E(sigma_x sigma_{x+r} | omega) over both base windows,
// mean t over the x base window, mean t over its r-shift, the same two for the
// y base window], with t the cluster mean tanh(beta H |C|) (1 on the boundary
// cluster). Regions are square, so both base windows have equal size.
ObserverFactory truncated_observer(const PairRegion& region, std::vector<int> r_list);

// <sigma_x; sigma_y> ~ A(r) - E[m_W] E[m_{W+r}], jackknife bias corrected.
std::vector<TruncatedCorrelationEstimate> truncated_from_records(const std::vector<Record>& records,
                                                                 const std::vector<int>& r_list, double h, double a,
                                                                 int L, std::size_t n_blocks = 20);

struct TruncatedRun {
  int L = 512;
  double a = 1.0 / 64;
  double h = 1.0;
  BoundaryCondition bc = BoundaryCondition::PlusWired;
  std::vector<int> r_list;  // empty: default_tail_r_list(L / 8)
  std::int64_t sweeps = 20000;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
  int chains = 1;
  double beta = kBetaCritical;
};
// Region: sites at least L/4 from the boundary, shrinking base.
std::vector<TruncatedCorrelationEstimate> truncated_2pt(const TruncatedRun& run,
                                                        std::vector<Record>* records = nullptr);

struct MassEstimate {
  double h = 0.0;
  double mass = 0.0;  // continuum units, lattice rate / a
  double se = 0.0;
  double window_lo = 0.0;  // lattice units
  double window_hi = 0.0;
  std::size_t points = 0;
};

// Rate of exponential decay of r^{1/4} G(r), from a log-linear fit over the
// self-consistent window [1/m, 4/m] (lattice units). Jackknife errors over
// the record blocks. Throws CorrelationLengthTooLarge when the available r
// range covers less than three decay lengths of the window.
MassEstimate mass_from_records(const std::vector<Record>& records, const std::vector<int>& r_list, double h, double a,
                               std::size_t n_blocks = 20);

struct MassFit {
  std::vector<MassEstimate> per_h;
  ExponentFit fit;  // log m vs log h
};
MassFit fit_mass_from(std::vector<MassEstimate> per_h);

struct MassRun {
  std::vector<double> h_list{0.5, 1.0, 2.0, 4.0};
  int L = 512;
  double a = 1.0 / 64;
  std::vector<int> r_list;  // empty: default_tail_r_list(L / 4)
  std::int64_t sweeps = 20000;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
  int chains = 1;
};
MassFit fit_mass(const MassRun& run);

// r = 1..16 then every second integer up to r_max.
std::vector<int> default_tail_r_list(int r_max);

// ---- scaling covariance -------------------------------------------------------

struct ScalingRun {
  int L = 128;  // lattice spacings
  double a = 1.0 / 256;
  double h = 0.0;
  double lambda = 2.0;
  BoundaryCondition bc = BoundaryCondition::Free;
  std::int64_t samples = 10000;
  std::int64_t thin = 2;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
};

struct ScalingResult {
  KsResult ks;
  double h_base = 0.0;
  double h_scaled = 0.0;
  std::vector<double> base;    // M over the base box at h
  std::vector<double> scaled;  // lambda^{-15/8} M over the scaled box at lambda^{-15/8} h
};

// Throws IncompatibleLambda unless lambda > 0 and lambda * L is an integer.
ScalingResult scaling_covariance_test(const ScalingRun& run);

// ---- free vs wired ------------------------------------------------------------

struct LoopSummary {
  double largest_cluster_diameter = 0.0;
  double largest_loop_diameter = 0.0;
  double big_loops = 0.0;  // loops with diameter > side/8
};

// Summary of a configuration with all external edges closed; loop fields stay
// zero unless with_loops.
LoopSummary loop_summary(const LatticeDomain& d, const BondConfig& omega, double side, bool with_loops = true);

struct FreeWiredRun {
  int L = 256;
  double a = 1.0 / 256;
  double beta = kBetaCritical;
  std::int64_t samples = 10000;
  std::int64_t thin = 1;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
  bool loops = true;  // also trace loops (cluster diameters only when false)
};

struct FreeWiredResult {
  KsResult cluster_diameter;
  KsResult loop_diameter;
  KsResult big_loop_count;
  std::vector<LoopSummary> free_side;
  std::vector<LoopSummary> wired_side;
};

// Free L-box against the planar dual of the wired (L-1)-box; the dual of a
// wired configuration is a free configuration carrying the same loops.
FreeWiredResult free_vs_wired_loops(const FreeWiredRun& run);

// ---- covariance decay of smeared fields ---------------------------------------

struct CovarianceRow {
  double u = 0.0;
  double cov = 0.0;
  double se = 0.0;
};

struct CovarianceDecay {
  std::vector<CovarianceRow> rows;
  double rate = 0.0;  // fitted tail decay of |Cov| times u^{1/4}, continuum units
  double rate_se = 0.0;
};

struct CovarianceRun {
  int L = 256;
  double a = 1.0 / 64;
  double h = 1.0;
  Rect f;                  // indicator support
  Rect g;                  // indicator support, translated by u along x
  std::vector<double> u_list;
  std::int64_t sweeps = 5000;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
};

// Cov(Phi(f), Phi(T^u g)) with conditional (given omega) estimators under plus
// bc. Throws InvalidParameter when f and some T^u g overlap.
CovarianceDecay covariance_decay_field(const CovarianceRun& run);

// ---- cutoff Cauchy diagnostic ---------------------------------------------------

struct CauchyRun {
  int L = 256;
  double a = 1.0 / 256;
  std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125};
  double alpha = 2.0;
  int modes = 128;  // per direction
  std::int64_t samples = 10000;
  std::int64_t thin = 1;
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
  int n_blocks = 20;
};

struct CauchyResult {
  CauchyDiagnostic diag;
  double max_tail_ratio = 0.0;  // largest tail bound / band second moment seen
};
CauchyResult cutoff_cauchy_run(const CauchyRun& run);

// ---- mesh diagnostic ----------------------------------------------------------------

struct MeshDiagnosticRun {
  double a = 1.0 / 64;
  double epsilon = 0.25;         // clusters with diameter > epsilon enter the collections
  std::int64_t burn_in = 200;
  std::uint64_t seed = 1;
  std::size_t max_loop_vertices = 128;  // loops are subsampled by stride beyond this
  double grid = 0.0;             // measure coarse-graining cell; <= 0 means epsilon / 8
};

// Distances between the large-cluster collections of independent critical
// free-bc samples on the unit square at meshes a and a/2.
MeshDiagnosticRow mesh_diagnostic(const MeshDiagnosticRun& run);

// ---- reporting -----------------------------------------------------------------

struct SummaryEntry {
  std::string test_name;
  double target = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  bool pass = false;
};
std::string summary_json(const std::vector<SummaryEntry>& entries);

std::string two_point_csv(const TwoPointResult& r);
std::string normalization_csv(const std::vector<NormalizationRow>& rows);
std::string truncated_csv(const std::vector<TruncatedCorrelationEstimate>& rows);
std::string mass_csv(const MassFit& fit);
std::string scaling_csv(const ScalingResult& r);
std::string free_wired_csv(const FreeWiredResult& r);
std::string covariance_csv(const CovarianceDecay& c);

}  // namespace fkising
