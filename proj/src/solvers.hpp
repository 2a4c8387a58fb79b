#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cnf.hpp"
#include "energy.hpp"

namespace hopsat {

enum class ScheduleShape { linear, geometric };

// Noise temperature as a function of the step index; nonincreasing, zero at
// the end of the run (geometric clamps its tail to exactly 0 on the final
// step).
struct AnnealSchedule {
  double t_initial = 1.0;
  ScheduleShape shape = ScheduleShape::linear;
  double geometric_factor = 0.995;  // geometric only
  std::uint64_t total_steps = 0;    // 0: take the run's max_steps

  double temperature(std::uint64_t step) const;
};

struct QuboSolverConfig {
  std::uint32_t n_groups = 1;
  AnnealSchedule schedule;
  std::uint64_t max_steps = 1000;
  std::uint64_t seed = 1;
  double penalty_P = 0.0;  // 0: accept whatever the model carries
  std::uint64_t sat_check_period = 1;
  bool metropolis = false;  // alternative acceptance rule; default is
                            // threshold-0 on noisy delta
  bool record_trace = false;
  std::uint64_t recompute_interval = 10000;
  // overrides the random initial original-variable state; auxiliaries are
  // still derived as y = a*b
  std::optional<Assignment> initial_state;
};

enum class PuboRule { classic, focus_offset };

struct PuboSolverConfig {
  PuboRule rule = PuboRule::classic;
  double e_offset_increment = 0.5;  // focus_offset only
  std::uint64_t max_steps = 1000;
  std::uint64_t seed = 1;
  bool record_trace = false;
  std::uint64_t recompute_interval = 10000;
  std::optional<Assignment> initial_state;
};

struct TraceEntry {
  std::uint64_t step = 0;
  double energy = 0.0;
  std::uint32_t unsat = 0;
};

struct RunResult {
  bool solved = false;
  std::uint64_t steps_taken = 0;
  Assignment final_state;  // full model state (originals first, then aux)
  double final_energy = 0.0;
  std::uint64_t seed = 0;
  std::uint32_t final_unsat = 0;
  std::uint64_t flips = 0;
  std::uint64_t offset_events = 0;        // focus_offset only
  bool solved_energy_positive = false;    // QUBO halted on SAT with E > 0
  std::vector<TraceEntry> trace;
};

// Maintains per-clause true-literal counts so the unsatisfied-clause count
// stays current under single flips of original variables.
class ClauseSatTracker {
 public:
  ClauseSatTracker(const CnfFormula& f, const Assignment& x);

  std::uint32_t unsat() const { return unsat_; }
  // Call with the variable's new value; returns the change in the
  // unsatisfied count.
  int flipped(std::uint32_t var, bool new_value);

 private:
  struct Slot {
    std::uint32_t clause;
    bool negated;
  };
  std::vector<std::vector<Slot>> var_slots_;
  std::vector<std::uint8_t> n_true_;
  std::uint32_t unsat_ = 0;
};

// Called once per accepted flip with the delta used for acceptance, the
// change in satisfied-clause count, and whether the flipped bit was an
// auxiliary.
using FlipObserver = std::function<void(double delta_e, int delta_sat, bool is_aux)>;

// Group-parallel annealed Hopfield descent on the quadratized model. Each
// step shuffles all neurons into n_groups groups; groups run sequentially;
// within a group every neuron compares its delta (vs. the state frozen at
// group entry) plus fresh uniform noise from [-T, T] against 0, and accepted
// flips land together at group exit. The CNF is checked every
// sat_check_period steps and the run halts on satisfaction regardless of the
// model energy.
RunResult run_qubo(const CnfFormula& f, const QuboModel& model, const QuboSolverConfig& cfg,
                   const FlipObserver& observer = nullptr);

// Single-neuron descent on the native cubic model: one uniformly random
// variable per step, flipped iff its delta is <= 0 (zero-delta moves diffuse
// across plateaus). Halts at energy 0.
RunResult run_pubo_classic(const CnfFormula& f, const PuboEnergy& model,
                           const PuboSolverConfig& cfg);

// Focused descent with an escape accumulator: every step scans all deltas;
// if some delta_i - A <= 0 a uniformly chosen candidate flips and A resets,
// otherwise A grows by e_offset_increment and no flip happens. Halts at
// energy 0.
RunResult run_pubo_focus_offset(const CnfFormula& f, const PuboEnergy& model,
                                const PuboSolverConfig& cfg);

std::string result_to_json(const RunResult& r, std::string_view solver_name);
std::string trace_to_csv(const RunResult& r);

}  // namespace hopsat
