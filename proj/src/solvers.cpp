#include "solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "rng.hpp"

namespace hopsat {

namespace {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form (matches the JSON dump of the value).
std::string fmt_num(double v) { return json(v).dump(); }

Assignment random_bits(Xoshiro256ss& rng, std::uint32_t n) {
  Assignment x(n);
  for (auto& b : x) b = std::uint8_t(rng.bounded(2));
  return x;
}

Assignment initial_originals(const std::optional<Assignment>& fixed, Xoshiro256ss& rng,
                             std::uint32_t n) {
  if (fixed) {
    if (fixed->size() != n) throw std::invalid_argument("initial_state length mismatch");
    return *fixed;
  }
  return random_bits(rng, n);
}

std::string bitstring(const Assignment& x) {
  std::string s(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) s[i] = '1';
  return s;
}

void validate_schedule(const AnnealSchedule& s) {
  if (s.t_initial < 0.0) throw std::invalid_argument("t_initial must be >= 0");
  if (s.shape == ScheduleShape::geometric &&
      !(s.geometric_factor > 0.0 && s.geometric_factor < 1.0))
    throw std::invalid_argument("geometric_factor must lie in (0,1)");
}

void validate_pubo(const CnfFormula& f, const PuboEnergy& model, const PuboSolverConfig& cfg,
                   PuboRule expected) {
  if (model.n_vars() != f.n_vars) throw std::invalid_argument("model/formula variable count mismatch");
  if (cfg.rule != expected) throw std::invalid_argument("config rule does not match solver");
  if (expected == PuboRule::focus_offset && !(cfg.e_offset_increment > 0.0))
    throw std::invalid_argument("e_offset_increment must be > 0");
}

// Energies compiled from CNF are exact integers (or half-integers for the
// quadratized model), so "reached zero" is a comparison against 1/4.
bool at_ground(double energy) { return energy < 0.25; }

}  // namespace

double AnnealSchedule::temperature(std::uint64_t step) const {
  if (t_initial <= 0.0 || total_steps == 0 || step + 1 >= total_steps) return 0.0;
  if (shape == ScheduleShape::linear)
    return t_initial * double(total_steps - 1 - step) / double(total_steps - 1);
  return t_initial * std::pow(geometric_factor, double(step));
}

ClauseSatTracker::ClauseSatTracker(const CnfFormula& f, const Assignment& x) {
  if (x.size() != f.n_vars) throw std::invalid_argument("assignment length mismatch");
  var_slots_.resize(f.n_vars);
  n_true_.resize(f.clauses.size());
  for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
    std::uint8_t t = 0;
    for (const Literal& lit : f.clauses[c].literals) {
      var_slots_[lit.var].push_back(Slot{c, lit.negated});
      if (lit.holds(x)) ++t;
    }
    n_true_[c] = t;
    if (t == 0) ++unsat_;
  }
}

int ClauseSatTracker::flipped(std::uint32_t var, bool new_value) {
  int delta = 0;
  for (const Slot& s : var_slots_[var]) {
    // the literal's truth always toggles with its variable
    if (new_value != s.negated) {
      if (++n_true_[s.clause] == 1) {
        --unsat_;
        --delta;
      }
    } else {
      if (--n_true_[s.clause] == 0) {
        ++unsat_;
        ++delta;
      }
    }
  }
  return delta;
}

RunResult run_qubo(const CnfFormula& f, const QuboModel& model, const QuboSolverConfig& cfg,
                   const FlipObserver& observer) {
  if (model.n_orig != f.n_vars) throw std::invalid_argument("model/formula variable count mismatch");
  const std::uint32_t n_total = model.n_total();
  if (cfg.n_groups < 1 || cfg.n_groups > n_total)
    throw std::invalid_argument("n_groups must lie in [1, variable count]");
  if (cfg.sat_check_period < 1) throw std::invalid_argument("sat_check_period must be >= 1");
  if (cfg.penalty_P != 0.0 && cfg.penalty_P != model.penalty)
    throw std::invalid_argument("config penalty_P disagrees with the model");
  validate_schedule(cfg.schedule);

  Xoshiro256ss init_rng = Xoshiro256ss::substream(cfg.seed, kStreamInit);
  Xoshiro256ss part_rng = Xoshiro256ss::substream(cfg.seed, kStreamPartition);
  Xoshiro256ss noise_rng = Xoshiro256ss::substream(cfg.seed, kStreamNoise);

  Assignment x = initial_originals(cfg.initial_state, init_rng, model.n_orig);
  IncrementalState inc(model.poly, extend_with_aux(model, x), cfg.recompute_interval);
  ClauseSatTracker sat(f, x);

  AnnealSchedule sched = cfg.schedule;
  if (sched.total_steps == 0) sched.total_steps = cfg.max_steps;

  RunResult r;
  r.seed = cfg.seed;
  auto record = [&](std::uint64_t step) {
    if (cfg.record_trace) r.trace.push_back({step, inc.energy(), sat.unsat()});
  };
  auto mark_solved = [&](std::uint64_t steps) {
    r.solved = true;
    r.steps_taken = steps;
    r.solved_energy_positive = inc.energy() > 0.0;
  };

  record(0);
  if (sat.unsat() == 0) mark_solved(0);

  std::vector<std::uint32_t> perm(n_total);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<std::uint32_t, double>> accepted;

  for (std::uint64_t step = 0; !r.solved && step < cfg.max_steps; ++step) {
    const double t = sched.temperature(step);
    part_rng.shuffle(perm);

    // near-equal group sizes; membership is the random part
    const std::uint32_t base = n_total / cfg.n_groups;
    const std::uint32_t rem = n_total % cfg.n_groups;
    std::uint32_t offset = 0;
    for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
      const std::uint32_t len = base + (g < rem ? 1 : 0);
      accepted.clear();
      for (std::uint32_t k = 0; k < len; ++k) {
        const std::uint32_t v = perm[offset + k];
        const double d = inc.delta(v);  // vs. state frozen at group entry
        bool take;
        if (cfg.metropolis) {
          const double u = noise_rng.u01();
          take = t > 0.0 ? u < std::exp(-d / t) : d <= 0.0;
        } else {
          take = d + noise_rng.uniform_pm(t) < 0.0;
        }
        if (take) accepted.emplace_back(v, d);
      }
      for (const auto& [v, d] : accepted) {
        inc.flip(v);
        int delta_sat = 0;
        if (v < model.n_orig) delta_sat = -sat.flipped(v, inc.bits()[v] != 0);
        ++r.flips;
        if (observer) observer(d, delta_sat, v >= model.n_orig);
      }
      offset += len;
    }

    record(step + 1);
    if ((step + 1) % cfg.sat_check_period == 0 && sat.unsat() == 0) mark_solved(step + 1);
  }

  if (!r.solved) {
    r.steps_taken = cfg.max_steps;
    if (sat.unsat() == 0) mark_solved(cfg.max_steps);
  }
  r.final_state = inc.bits();
  r.final_energy = inc.energy();
  r.final_unsat = sat.unsat();
  return r;
}

RunResult run_pubo_classic(const CnfFormula& f, const PuboEnergy& model,
                           const PuboSolverConfig& cfg) {
  validate_pubo(f, model, cfg, PuboRule::classic);
  const std::uint32_t n = model.n_vars();

  Xoshiro256ss init_rng = Xoshiro256ss::substream(cfg.seed, kStreamInit);
  Xoshiro256ss pick_rng = Xoshiro256ss::substream(cfg.seed, kStreamPartition);

  IncrementalState inc(model.poly, initial_originals(cfg.initial_state, init_rng, n),
                       cfg.recompute_interval);

  RunResult r;
  r.seed = cfg.seed;
  auto record = [&](std::uint64_t step) {
    if (cfg.record_trace)
      r.trace.push_back({step, inc.energy(), std::uint32_t(std::llround(inc.energy()))});
  };

  record(0);
  if (at_ground(inc.energy())) {
    r.solved = true;
    r.steps_taken = 0;
  }

  for (std::uint64_t step = 0; !r.solved && step < cfg.max_steps; ++step) {
    const std::uint32_t v = std::uint32_t(pick_rng.bounded(n));
    if (inc.delta(v) <= 0.0) {  // zero-delta moves keep plateau diffusion alive
      inc.flip(v);
      ++r.flips;
    }
    record(step + 1);
    if (at_ground(inc.energy())) {
      r.solved = true;
      r.steps_taken = step + 1;
    }
  }

  if (!r.solved) r.steps_taken = cfg.max_steps;
  r.final_state = inc.bits();
  r.final_energy = inc.energy();
  r.final_unsat = std::uint32_t(std::llround(inc.energy()));
  return r;
}

RunResult run_pubo_focus_offset(const CnfFormula& f, const PuboEnergy& model,
                                const PuboSolverConfig& cfg) {
  validate_pubo(f, model, cfg, PuboRule::focus_offset);
  const std::uint32_t n = model.n_vars();

  Xoshiro256ss init_rng = Xoshiro256ss::substream(cfg.seed, kStreamInit);
  Xoshiro256ss tie_rng = Xoshiro256ss::substream(cfg.seed, kStreamTieBreak);

  IncrementalState inc(model.poly, initial_originals(cfg.initial_state, init_rng, n),
                       cfg.recompute_interval);

  RunResult r;
  r.seed = cfg.seed;
  auto record = [&](std::uint64_t step) {
    if (cfg.record_trace)
      r.trace.push_back({step, inc.energy(), std::uint32_t(std::llround(inc.energy()))});
  };

  record(0);
  if (at_ground(inc.energy())) {
    r.solved = true;
    r.steps_taken = 0;
  }

  double accum = 0.0;
  std::vector<std::uint32_t> candidates;
  for (std::uint64_t step = 0; !r.solved && step < cfg.max_steps; ++step) {
    candidates.clear();
    for (std::uint32_t v = 0; v < n; ++v)
      if (inc.delta(v) - accum <= 0.0) candidates.push_back(v);
    if (!candidates.empty()) {
      inc.flip(candidates[tie_rng.bounded(candidates.size())]);
      accum = 0.0;
      ++r.flips;
    } else {
      accum += cfg.e_offset_increment;
      ++r.offset_events;
    }
    record(step + 1);
    if (at_ground(inc.energy())) {
      r.solved = true;
      r.steps_taken = step + 1;
    }
  }

  if (!r.solved) r.steps_taken = cfg.max_steps;
  r.final_state = inc.bits();
  r.final_energy = inc.energy();
  r.final_unsat = std::uint32_t(std::llround(inc.energy()));
  return r;
}

std::string result_to_json(const RunResult& r, std::string_view solver_name) {
  json j;
  j["solver"] = std::string(solver_name);
  j["seed"] = r.seed;
  j["solved"] = r.solved;
  j["steps_taken"] = r.steps_taken;
  j["flips"] = r.flips;
  j["offset_events"] = r.offset_events;
  j["solved_energy_positive"] = r.solved_energy_positive;
  j["final_energy"] = r.final_energy;
  j["final_unsat"] = r.final_unsat;
  j["final_state"] = bitstring(r.final_state);
  return j.dump(2) + "\n";
}

std::string trace_to_csv(const RunResult& r) {
  std::string out = "step,energy,unsat\n";
  for (const TraceEntry& e : r.trace) {
    out += std::to_string(e.step);
    out += ',';
    out += fmt_num(e.energy);
    out += ',';
    out += std::to_string(e.unsat);
    out += '\n';
  }
  return out;
}

}  // namespace hopsat
