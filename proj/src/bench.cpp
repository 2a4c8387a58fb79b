#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rng.hpp"

namespace hopsat {

namespace {

using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// infinity is serialized as the string "inf" (JSON numbers cannot carry it)
json num_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

std::string fmt_num(double v) { return std::isinf(v) ? "inf" : json(v).dump(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

json cost_model_json(const CostModel& m) {
  json j;
  j["qubo_cycle_time_s"] = m.qubo_cycle_time_s;
  j["qubo_cycle_energy_j"] = m.qubo_cycle_energy_j;
  j["pubo_time_factor"] = m.pubo_time_factor;
  j["pubo_energy_divisor"] = m.pubo_energy_divisor;
  j["n_col"] = m.n_col;
  j["n_wl"] = m.n_wl;
  j["tile_time_coeff"] = m.tile_time_coeff;
  j["tile_energy_coeff"] = m.tile_energy_coeff;
  j["relative_only"] = m.relative_only;
  return j;
}

json solver_json(const BenchSolverConfig& s) {
  json j;
  j["name"] = solver_name(s.id);
  if (s.id == SolverId::qubo) {
    j["penalty_P"] = s.penalty;
    j["n_groups"] = s.qubo.n_groups;
    j["t_initial"] = s.qubo.schedule.t_initial;
    j["schedule"] = s.qubo.schedule.shape == ScheduleShape::linear ? "linear" : "geometric";
    j["geometric_factor"] = s.qubo.schedule.geometric_factor;
    j["sat_check_period"] = s.qubo.sat_check_period;
    j["metropolis"] = s.qubo.metropolis;
  } else if (s.id == SolverId::pubo_focus) {
    j["e_offset_increment"] = s.pubo.e_offset_increment;
  }
  return j;
}

struct Outcome {
  std::uint8_t solved = 0;
  std::uint8_t positive_energy = 0;
};

}  // namespace

double tts_steps(double p_hat, std::uint64_t max_steps, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target must lie in (0,1)");
  if (!(p_hat >= 0.0 && p_hat <= 1.0)) throw std::invalid_argument("p_hat must lie in [0,1]");
  if (p_hat == 0.0) return kInf;
  if (p_hat >= target) return double(max_steps);
  return double(max_steps) * std::log1p(-target) / std::log1p(-p_hat);
}

std::uint32_t tiles_required(std::uint32_t n_vars, std::uint32_t n_col) {
  if (n_vars < 1) throw std::invalid_argument("n_vars must be >= 1");
  if (n_col < 1) throw std::invalid_argument("n_col must be >= 1");
  return (n_vars + n_col - 1) / n_col;
}

std::uint64_t pubo_wordlines(std::uint32_t n_vars) {
  if (n_vars < 2) throw std::invalid_argument("n_vars must be >= 2");
  return std::uint64_t(n_vars) * (n_vars - 1) / 2;
}

std::uint32_t search_space_bits(std::uint32_t n_vars, std::uint32_t n_clauses, Representation r) {
  return r == Representation::native ? n_vars : n_vars + n_clauses;
}

double CostModel::cycle_time(SolverKind kind, std::uint32_t n_vars) const {
  const double base = kind == SolverKind::qubo ? qubo_cycle_time_s
                                               : qubo_cycle_time_s * pubo_time_factor;
  return base * (1.0 + tile_time_coeff * double(tiles_required(n_vars, n_col) - 1));
}

double CostModel::cycle_energy(SolverKind kind, std::uint32_t n_vars) const {
  const double base = kind == SolverKind::qubo ? qubo_cycle_energy_j
                                               : qubo_cycle_energy_j / pubo_energy_divisor;
  return base * (1.0 + tile_energy_coeff * double(tiles_required(n_vars, n_col) - 1));
}

void validate(const CostModel& m) {
  if (!(m.qubo_cycle_time_s > 0.0) || !(m.qubo_cycle_energy_j > 0.0))
    throw std::invalid_argument("cycle costs must be positive");
  if (!(m.pubo_time_factor > 0.0) || !(m.pubo_energy_divisor > 0.0))
    throw std::invalid_argument("relative factors must be positive");
  if (m.n_col < 1 || m.n_wl < 1) throw std::invalid_argument("tile dimensions must be >= 1");
  if (m.tile_time_coeff < 0.0 || m.tile_energy_coeff < 0.0)
    throw std::invalid_argument("tile coefficients must be >= 0");
}

CostModel cost_model_from_json(std::string_view text) {
  json j = json::parse(text);
  CostModel m;
  for (const auto& [key, value] : j.items()) {
    if (key == "qubo_cycle_time_s") m.qubo_cycle_time_s = value.get<double>();
    else if (key == "qubo_cycle_energy_j") m.qubo_cycle_energy_j = value.get<double>();
    else if (key == "pubo_time_factor") m.pubo_time_factor = value.get<double>();
    else if (key == "pubo_energy_divisor") m.pubo_energy_divisor = value.get<double>();
    else if (key == "n_col") m.n_col = value.get<std::uint32_t>();
    else if (key == "n_wl") m.n_wl = value.get<std::uint32_t>();
    else if (key == "tile_time_coeff") m.tile_time_coeff = value.get<double>();
    else if (key == "tile_energy_coeff") m.tile_energy_coeff = value.get<double>();
    else if (key == "relative_only") m.relative_only = value.get<bool>();
    else throw std::invalid_argument("unknown cost model key: " + key);
  }
  validate(m);
  return m;
}

std::string cost_model_to_json(const CostModel& m) { return cost_model_json(m).dump(2) + "\n"; }

double tts_seconds(double steps, const CostModel& m, SolverKind kind, std::uint32_t n_vars) {
  return steps * m.cycle_time(kind, n_vars);
}

double ets_joules(double steps, const CostModel& m, SolverKind kind, std::uint32_t n_vars) {
  return steps * m.cycle_energy(kind, n_vars);
}

const char* solver_name(SolverId id) {
  switch (id) {
    case SolverId::qubo: return "qubo";
    case SolverId::pubo_classic: return "pubo-classic";
    case SolverId::pubo_focus: return "pubo-focus";
  }
  return "?";
}

BenchReport run_benchmark(const std::vector<BenchInstance>& instances, const BenchConfig& cfg) {
  if (instances.empty()) throw std::invalid_argument("no instances");
  if (cfg.solvers.empty()) throw std::invalid_argument("no solvers");
  if (cfg.tts.n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (!(cfg.tts.target > 0.0 && cfg.tts.target < 1.0))
    throw std::invalid_argument("target must lie in (0,1)");
  validate(cfg.cost);

  const std::size_t n_inst = instances.size();
  const std::size_t n_solv = cfg.solvers.size();
  const std::size_t n_runs = cfg.tts.n_runs;

  // shared immutable models, compiled up front
  std::vector<PuboEnergy> pubos(n_inst);
  std::vector<std::vector<QuboModel>> qubos(n_inst, std::vector<QuboModel>(n_solv));
  bool any_pubo = false;
  for (const auto& s : cfg.solvers) any_pubo |= s.id != SolverId::qubo;
  for (std::size_t i = 0; i < n_inst; ++i) {
    if (any_pubo) pubos[i] = pubo_from_cnf(instances[i].formula);
    for (std::size_t s = 0; s < n_solv; ++s)
      if (cfg.solvers[s].id == SolverId::qubo)
        qubos[i][s] = quadratize(instances[i].formula, cfg.solvers[s].penalty);
  }

  const std::size_t total = n_inst * n_solv * n_runs;
  std::vector<Outcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  std::string first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total || failed.load()) return;
      const std::size_t i = idx / (n_solv * n_runs);
      const std::size_t s = (idx / n_runs) % n_solv;
      const std::size_t r = idx % n_runs;
      const BenchSolverConfig& sc = cfg.solvers[s];
      const std::uint64_t seed = derive_seed(
          cfg.master_seed,
          {fnv1a64(instances[i].name), fnv1a64(solver_name(sc.id)), std::uint64_t(r)});
      try {
        RunResult res;
        if (sc.id == SolverId::qubo) {
          QuboSolverConfig qc = sc.qubo;
          qc.seed = seed;
          qc.max_steps = cfg.tts.max_steps;
          qc.record_trace = false;
          res = run_qubo(instances[i].formula, qubos[i][s], qc);
        } else {
          PuboSolverConfig pc = sc.pubo;
          pc.rule = sc.id == SolverId::pubo_classic ? PuboRule::classic : PuboRule::focus_offset;
          pc.seed = seed;
          pc.max_steps = cfg.tts.max_steps;
          pc.record_trace = false;
          res = sc.id == SolverId::pubo_classic
                    ? run_pubo_classic(instances[i].formula, pubos[i], pc)
                    : run_pubo_focus_offset(instances[i].formula, pubos[i], pc);
        }
        outcomes[idx] = Outcome{std::uint8_t(res.solved), std::uint8_t(res.solved_energy_positive)};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty())
          first_error = "run failed: instance " + instances[i].name + ", solver " +
                        solver_name(sc.id) + ", seed " + std::to_string(seed) + ": " + e.what();
        failed.store(true);
        return;
      }
    }
  };

  std::uint32_t n_threads = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::uint32_t(std::min<std::size_t>(n_threads, total));
  std::vector<std::thread> pool;
  for (std::uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error(first_error);

  BenchReport report;
  report.config = cfg;
  for (std::size_t i = 0; i < n_inst; ++i) {
    for (std::size_t s = 0; s < n_solv; ++s) {
      InstanceSolverResult row;
      row.instance = instances[i].name;
      row.solver = solver_name(cfg.solvers[s].id);
      row.n_vars = instances[i].formula.n_vars;
      row.n_clauses = instances[i].formula.n_clauses();
      row.n_runs = cfg.tts.n_runs;
      for (std::size_t r = 0; r < n_runs; ++r) {
        const Outcome& o = outcomes[(i * n_solv + s) * n_runs + r];
        row.n_solved += o.solved;
        row.positive_energy_halts += o.positive_energy;
      }
      row.p_hat = double(row.n_solved) / double(row.n_runs);
      const SolverKind kind = cfg.solvers[s].id == SolverId::qubo ? SolverKind::qubo : SolverKind::pubo;
      row.tts_steps = tts_steps(row.p_hat, cfg.tts.max_steps, cfg.tts.target);
      row.tts_seconds = tts_seconds(row.tts_steps, cfg.cost, kind, row.n_vars);
      row.ets_joules = ets_joules(row.tts_steps, cfg.cost, kind, row.n_vars);
      report.per_instance.push_back(std::move(row));
    }
  }
  std::sort(report.per_instance.begin(), report.per_instance.end(),
            [](const InstanceSolverResult& a, const InstanceSolverResult& b) {
              if (a.instance != b.instance) return a.instance < b.instance;
              return a.solver < b.solver;
            });

  std::map<std::pair<std::uint32_t, std::string>, std::vector<const InstanceSolverResult*>> groups;
  for (const auto& row : report.per_instance) groups[{row.n_vars, row.solver}].push_back(&row);
  for (const auto& [key, rows] : groups) {
    SizeSolverMedian m;
    m.size = key.first;
    m.solver = key.second;
    m.n_instances = std::uint32_t(rows.size());
    m.n_runs = cfg.tts.n_runs;
    std::vector<double> steps, secs, joules;
    for (const auto* r : rows) {
      steps.push_back(r->tts_steps);
      secs.push_back(r->tts_seconds);
      joules.push_back(r->ets_joules);
    }
    m.median_tts_steps = median(std::move(steps));
    m.median_tts_seconds = median(std::move(secs));
    m.median_ets_joules = median(std::move(joules));
    report.medians.push_back(std::move(m));
  }
  return report;
}

std::string report_to_json(const BenchReport& r) {
  json j;
  json prov;
  prov["master_seed"] = r.config.master_seed;
  prov["tts"] = json{{"target", r.config.tts.target},
                     {"n_runs", r.config.tts.n_runs},
                     {"max_steps", r.config.tts.max_steps}};
  prov["cost_model"] = cost_model_json(r.config.cost);
  json solvers = json::array();
  for (const auto& s : r.config.solvers) solvers.push_back(solver_json(s));
  prov["solvers"] = std::move(solvers);
  prov["step_unit"] = json{{"qubo", "one full group cycle"},
                           {"pubo-classic", "one variable selection"},
                           {"pubo-focus", "one variable selection or offset event"}};
  prov["tuning"] = r.config.tuning_note;
  j["provenance"] = std::move(prov);

  json rows = json::array();
  for (const auto& row : r.per_instance) {
    json jr;
    jr["instance"] = row.instance;
    jr["solver"] = row.solver;
    jr["n_vars"] = row.n_vars;
    jr["n_clauses"] = row.n_clauses;
    jr["n_runs"] = row.n_runs;
    jr["n_solved"] = row.n_solved;
    jr["p_hat"] = row.p_hat;
    jr["tts_steps"] = num_or_inf(row.tts_steps);
    jr["tts_seconds"] = num_or_inf(row.tts_seconds);
    jr["ets_joules"] = num_or_inf(row.ets_joules);
    jr["positive_energy_halts"] = row.positive_energy_halts;
    rows.push_back(std::move(jr));
  }
  j["instances"] = std::move(rows);

  json meds = json::array();
  for (const auto& m : r.medians) {
    json jm;
    jm["size"] = m.size;
    jm["solver"] = m.solver;
    jm["median_tts_steps"] = num_or_inf(m.median_tts_steps);
    jm["median_tts_seconds"] = num_or_inf(m.median_tts_seconds);
    jm["median_ets_joules"] = num_or_inf(m.median_ets_joules);
    jm["n_instances"] = m.n_instances;
    jm["n_runs"] = m.n_runs;
    meds.push_back(std::move(jm));
  }
  j["medians"] = std::move(meds);
  return j.dump(2) + "\n";
}

std::string medians_to_csv(const BenchReport& r) {
  std::string out = "size,solver,median_tts_steps,median_tts_seconds,median_ets_joules,n_instances,n_runs\n";
  for (const auto& m : r.medians) {
    out += std::to_string(m.size);
    out += ',';
    out += m.solver;
    out += ',';
    out += fmt_num(m.median_tts_steps);
    out += ',';
    out += fmt_num(m.median_tts_seconds);
    out += ',';
    out += fmt_num(m.median_ets_joules);
    out += ',';
    out += std::to_string(m.n_instances);
    out += ',';
    out += std::to_string(m.n_runs);
    out += '\n';
  }
  return out;
}

DeltaHistogram delta_correlation_histogram(const CnfFormula& f, const QuboModel& model,
                                           const QuboSolverConfig& cfg, double bin_width) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  DeltaHistogram h;
  h.bin_width = bin_width;
  auto observer = [&](double delta_e, int delta_sat, bool is_aux) {
    const std::int64_t bin = std::int64_t(std::floor(-delta_e / bin_width));
    ++h.counts[{bin, delta_sat}];
    ++h.total;
    if (is_aux) ++h.aux_flips;
    else ++h.orig_flips;
  };
  RunResult r = run_qubo(f, model, cfg, observer);
  h.solved = r.solved;
  h.steps_taken = r.steps_taken;
  return h;
}

void hist_merge(DeltaHistogram& into, const DeltaHistogram& from) {
  if (into.bin_width != from.bin_width) throw std::invalid_argument("bin width mismatch");
  for (const auto& [key, count] : from.counts) into.counts[key] += count;
  into.total += from.total;
  into.aux_flips += from.aux_flips;
  into.orig_flips += from.orig_flips;
  into.solved = into.solved || from.solved;
  into.steps_taken += from.steps_taken;
}

std::string hist_to_csv(const DeltaHistogram& h) {
  std::string out = "neg_delta_e_lo,delta_sat,count\n";
  for (const auto& [key, count] : h.counts) {
    out += fmt_num(double(key.first) * h.bin_width);
    out += ',';
    out += std::to_string(key.second);
    out += ',';
    out += std::to_string(count);
    out += '\n';
  }
  return out;
}

std::string hist_to_json(const DeltaHistogram& h) {
  json j;
  j["bin_width"] = h.bin_width;
  j["total"] = h.total;
  j["aux_flips"] = h.aux_flips;
  j["orig_flips"] = h.orig_flips;
  j["solved"] = h.solved;
  j["steps_taken"] = h.steps_taken;
  json rows = json::array();
  for (const auto& [key, count] : h.counts)
    rows.push_back(json{{"neg_delta_e_lo", double(key.first) * h.bin_width},
                        {"delta_sat", key.second},
                        {"count", count}});
  j["bins"] = std::move(rows);
  return j.dump(2) + "\n";
}

}  // namespace hopsat
