#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cnf.hpp"
#include "energy.hpp"

namespace hopsat {

// Maximal set of equal-energy configurations (over original variables,
// stored as bit masks) connected by zero-delta single flips. is_local_min
// means no member has a strictly lower-energy neighbor.
struct Valley {
  double energy = 0.0;
  std::vector<std::uint64_t> configs;  // sorted ascending
  bool is_local_min = false;
  bool truncated = false;  // plateau expansion hit the size cap
};

std::uint64_t mask_of(const Assignment& x);
Assignment assignment_of(std::uint64_t mask, std::uint32_t n_vars);

// Full 2^N sweep (gray-code incremental energies) followed by flood fill
// over the k_lowest distinct energy levels. Requires n_vars <= 24.
std::vector<Valley> enumerate_valleys_exhaustive(const PuboEnergy& model, std::uint32_t k_lowest);

// Keeps only valleys without zero-barrier exits to lower energy.
std::vector<Valley> discard_saddles(const std::vector<Valley>& valleys);

struct GwlConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_valleys = 200;  // stop once this many local-min valleys are known
  std::uint32_t max_levels = 5;   // keep valleys in this many lowest energy levels
  double lnf_initial = 1.0;
  double lnf_final = 1e-6;
  double flatness = 0.8;          // histogram min >= flatness * mean
  std::uint64_t flatness_check_interval = 10000;
  std::uint64_t max_flat_steps = 50'000'000;  // cap on the density-of-states stage
  std::uint64_t production_steps = 0;         // 0: scaled from n_vars
  std::uint64_t valley_size_cap = 1u << 22;
  double window_margin = 2.0;  // energy window = [0, mean of random assignments + margin]
};

struct GwlResult {
  std::vector<Valley> valleys;  // sorted by (energy, first config); saddles included
  bool complete = false;        // reached n_valleys local-min valleys in budget
  std::uint64_t production_steps = 0;
  std::uint64_t flat_steps = 0;
  double final_lnf = 0.0;
};

// Flat-histogram walk over energy levels: estimates the density of states
// with a multiplicative modification factor (halved on flatness, terminated
// below lnf_final), then a production walk with the frozen estimate collects
// low-energy configurations. Each collected configuration seeds a plateau
// BFS that reconstructs its full valley; valleys are deduplicated by member
// overlap.
GwlResult gwl_sample_valleys(const PuboEnergy& model, const GwlConfig& cfg);

// One-directional move probability between equal-PUBO-energy single-flip
// neighbors in the quadratized landscape, averaged over the auxiliary
// combinations that realize the PUBO energy at the source. p is clamped to
// [0,1]; p_raw keeps the unclamped per-clause product.
struct TransitionEstimate {
  Assignment from, to;
  std::uint64_t n_y = 0;
  double p = 0.0;
  double p_raw = 0.0;
};

TransitionEstimate qubo_transition_prob(const QuboModel& model, const Assignment& x_a,
                                        const Assignment& x_b, double temperature);

enum class ConnectMode { threshold, bernoulli };

struct ConnectivityConfig {
  ConnectMode mode = ConnectMode::threshold;
  double p_min = 0.5;      // threshold mode
  std::uint64_t seed = 1;  // bernoulli mode
  double temperature = 1.0;
};

// Splits each valley into the components that survive in the quadratized
// landscape: an intra-valley single-flip edge is kept when the (direction-
// symmetrized, max of both) transition probability passes the mode's rule.
// Distinct maximal valleys share no iso-energy single-flip pairs, so
// components only ever refine the input partition.
std::vector<Valley> build_qubo_connectivity(const std::vector<Valley>& valleys,
                                            const QuboModel& model,
                                            const ConnectivityConfig& cfg);

struct StatsBin {
  double s_lo = 0.0;           // lower edge of the entropy bin
  double sigma = 0.0;          // ln(count in bin) / N
  std::uint64_t n_valleys = 0;
};

struct LandscapeStats {
  std::uint32_t n_vars = 0;
  double bin_width = 0.01;
  std::vector<StatsBin> bins;  // ascending s_lo, only nonempty bins
  std::uint64_t total_valleys = 0;
};

// s_i = ln(size_i)/N per valley, binned at fixed width; sigma per bin is
// ln(bin count)/N.
LandscapeStats valley_entropy_complexity(const std::vector<Valley>& components,
                                         std::uint32_t n_vars, double bin_width = 0.01);

// Mean sigma per bin across the instances that populate the bin; n_valleys
// accumulates.
LandscapeStats aggregate_stats(const std::vector<LandscapeStats>& per_instance);

// Whole-instance analysis: PUBO local-min valleys (exhaustive when small
// enough, sampled otherwise) plus quadratized connectivity at each requested
// temperature.
struct LandscapeJobConfig {
  std::vector<double> temperatures{0.05, 10.0};
  double penalty = 0.5;
  ConnectMode mode = ConnectMode::threshold;
  double p_min = 0.5;
  std::uint64_t seed = 1;
  std::uint32_t max_levels = 5;
  std::uint32_t n_valleys = 200;       // sampler target
  std::uint32_t exhaustive_limit = 16; // use the full sweep up to this many variables
  bool force_gwl = false;
  double bin_width = 0.01;
  GwlConfig gwl;
};

struct InstanceLandscape {
  std::string instance;
  std::uint32_t n_vars = 0;
  std::string method;  // "exhaustive" or "gwl"
  bool gwl_complete = true;
  std::vector<Valley> pubo_valleys;  // local minima only
  LandscapeStats pubo_stats;
  struct PerTemperature {
    double temperature = 0.0;
    std::vector<Valley> components;
    LandscapeStats stats;
  };
  std::vector<PerTemperature> per_t;
};

InstanceLandscape analyze_instance(const CnfFormula& f, std::string name,
                                   const LandscapeJobConfig& cfg);

// CSV columns: instance,T,P,mode,s_bin,sigma,n_valleys. Native-model rows
// carry mode "pubo" and T 0; aggregate rows use instance "aggregate".
std::string landscape_csv(const std::vector<InstanceLandscape>& results,
                          const LandscapeJobConfig& cfg);
std::string landscape_json(const std::vector<InstanceLandscape>& results,
                           const LandscapeJobConfig& cfg, bool dump_valleys);

}  // namespace hopsat
