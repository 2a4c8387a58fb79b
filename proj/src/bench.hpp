#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cnf.hpp"
#include "energy.hpp"
#include "solvers.hpp"

namespace hopsat {

// Expected steps to reach the target success probability with fixed-budget
// restarts: max_steps * ln(1-target)/ln(1-p_hat). p_hat = 0 yields +infinity;
// p_hat >= target yields max_steps.
double tts_steps(double p_hat, std::uint64_t max_steps, double target);

std::uint32_t tiles_required(std::uint32_t n_vars, std::uint32_t n_col = 19);
std::uint64_t pubo_wordlines(std::uint32_t n_vars);

enum class Representation { native, quadratized };
std::uint32_t search_space_bits(std::uint32_t n_vars, std::uint32_t n_clauses, Representation r);

enum class SolverKind { qubo, pubo };

// Per-cycle hardware costs. Only the relative defaults are published
// (quadratic cycles cost 2.45x the energy and 1/1.35x the time of cubic
// cycles); absolute baselines are config inputs and flagged relative_only
// until calibrated values are supplied. Costs may grow with the tile count
// via the per-extra-tile coefficients (default 0: flat).
struct CostModel {
  double qubo_cycle_time_s = 1e-9;
  double qubo_cycle_energy_j = 1e-9;
  double pubo_time_factor = 1.35;
  double pubo_energy_divisor = 2.45;
  std::uint32_t n_col = 19;
  std::uint32_t n_wl = 400;
  double tile_time_coeff = 0.0;
  double tile_energy_coeff = 0.0;
  bool relative_only = true;

  double cycle_time(SolverKind kind, std::uint32_t n_vars) const;
  double cycle_energy(SolverKind kind, std::uint32_t n_vars) const;
};

void validate(const CostModel& m);
CostModel cost_model_from_json(std::string_view text);
std::string cost_model_to_json(const CostModel& m);

double tts_seconds(double steps, const CostModel& m, SolverKind kind, std::uint32_t n_vars);
double ets_joules(double steps, const CostModel& m, SolverKind kind, std::uint32_t n_vars);

enum class SolverId { qubo, pubo_classic, pubo_focus };
const char* solver_name(SolverId id);

struct BenchSolverConfig {
  SolverId id = SolverId::qubo;
  double penalty = 1.0;    // quadratized model compilation (qubo only)
  QuboSolverConfig qubo;   // seed and max_steps are overridden per run
  PuboSolverConfig pubo;
};

struct TtsConfig {
  double target = 0.99;
  std::uint32_t n_runs = 100;
  std::uint64_t max_steps = 10000;
};

struct BenchConfig {
  std::vector<BenchSolverConfig> solvers;
  TtsConfig tts;
  CostModel cost;
  std::uint64_t master_seed = 1;
  std::uint32_t jobs = 0;  // 0: hardware concurrency
  std::string tuning_note;  // hyperparameter provenance, echoed into reports
};

struct BenchInstance {
  std::string name;
  CnfFormula formula;
};

struct InstanceSolverResult {
  std::string instance;
  std::string solver;
  std::uint32_t n_vars = 0;
  std::uint32_t n_clauses = 0;
  std::uint32_t n_runs = 0;
  std::uint32_t n_solved = 0;
  double p_hat = 0.0;
  double tts_steps = 0.0;
  double tts_seconds = 0.0;
  double ets_joules = 0.0;
  std::uint64_t positive_energy_halts = 0;  // qubo: solved while model energy > 0
};

struct SizeSolverMedian {
  std::uint32_t size = 0;
  std::string solver;
  double median_tts_steps = 0.0;
  double median_tts_seconds = 0.0;
  double median_ets_joules = 0.0;
  std::uint32_t n_instances = 0;
  std::uint32_t n_runs = 0;
};

struct BenchReport {
  std::vector<InstanceSolverResult> per_instance;  // sorted by (instance, solver)
  std::vector<SizeSolverMedian> medians;           // sorted by (size, solver)
  BenchConfig config;
};

// Runs the instance x solver x seed grid (parallel, order-independent: every
// run's seed is derived from the master seed, the instance name, the solver
// name, and the run index) and aggregates success fractions into TTS/ETS
// plus per-size medians.
BenchReport run_benchmark(const std::vector<BenchInstance>& instances, const BenchConfig& cfg);

std::string report_to_json(const BenchReport& r);
std::string medians_to_csv(const BenchReport& r);

// Joint distribution of (-delta_E, delta_SAT) over the accepted flips of one
// quadratized-solver run; -delta_E is binned at bin_width, delta_SAT is the
// exact change in satisfied-clause count.
struct DeltaHistogram {
  double bin_width = 0.5;
  std::map<std::pair<std::int64_t, int>, std::uint64_t> counts;  // (bin, dsat)
  std::uint64_t total = 0;
  std::uint64_t aux_flips = 0;
  std::uint64_t orig_flips = 0;
  bool solved = false;
  std::uint64_t steps_taken = 0;
};

DeltaHistogram delta_correlation_histogram(const CnfFormula& f, const QuboModel& model,
                                           const QuboSolverConfig& cfg, double bin_width = 0.5);
void hist_merge(DeltaHistogram& into, const DeltaHistogram& from);
std::string hist_to_csv(const DeltaHistogram& h);
std::string hist_to_json(const DeltaHistogram& h);

}  // namespace hopsat
