#include "hopsat/hopsat.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bench.hpp"
#include "cnf.hpp"
#include "energy.hpp"
#include "json.hpp"
#include "landscape.hpp"
#include "rng.hpp"
#include "solvers.hpp"

using json = nlohmann::ordered_json;

struct hopsat_formula {
  hopsat::CnfFormula f;
};
struct hopsat_pubo {
  hopsat::PuboEnergy m;
};
struct hopsat_qubo {
  hopsat::QuboModel m;
};

namespace {

thread_local std::string g_error;

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename Fn>
hopsat_status guard(Fn&& fn) {
  try {
    fn();
    return HOPSAT_OK;
  } catch (const hopsat::ParseError& e) {
    g_error = e.what();
    return HOPSAT_ERR_PARSE;
  } catch (const nlohmann::json::exception& e) {
    g_error = e.what();
    return HOPSAT_ERR_PARSE;
  } catch (const std::invalid_argument& e) {
    g_error = e.what();
    return HOPSAT_ERR_INVALID;
  } catch (const std::exception& e) {
    g_error = e.what();
    return HOPSAT_ERR_RUNTIME;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

hopsat::Assignment to_assignment(const uint8_t* bits, size_t n) {
  require(bits != nullptr, "bits is null");
  hopsat::Assignment x(bits, bits + n);
  for (auto b : x) require(b <= 1, "bits must be 0 or 1");
  return x;
}

struct SolveSpec {
  hopsat::SolverId id = hopsat::SolverId::qubo;
  double penalty = 1.0;
  hopsat::QuboSolverConfig q;
  hopsat::PuboSolverConfig p;
  double bin_width = 0.5;
};

hopsat::SolverId solver_id(const std::string& name) {
  if (name == "qubo") return hopsat::SolverId::qubo;
  if (name == "pubo-classic") return hopsat::SolverId::pubo_classic;
  if (name == "pubo-focus") return hopsat::SolverId::pubo_focus;
  throw std::invalid_argument("unknown solver: " + name);
}

// Applies one config key; key_solver names the field carrying the solver id
// ("solver" for standalone configs, "name" inside bench solver lists).
// Returns false when the key is not a solver parameter.
bool apply_solver_key(SolveSpec& s, const std::string& key, const json& value) {
  const bool is_qubo = s.id == hopsat::SolverId::qubo;
  const bool is_focus = s.id == hopsat::SolverId::pubo_focus;
  if (key == "penalty_P") {
    require(is_qubo, "penalty_P applies to the qubo solver only");
    s.penalty = value.get<double>();
  } else if (key == "n_groups") {
    require(is_qubo, "n_groups applies to the qubo solver only");
    s.q.n_groups = value.get<std::uint32_t>();
  } else if (key == "t_initial") {
    require(is_qubo, "t_initial applies to the qubo solver only");
    s.q.schedule.t_initial = value.get<double>();
  } else if (key == "schedule") {
    require(is_qubo, "schedule applies to the qubo solver only");
    const std::string shape = value.get<std::string>();
    if (shape == "linear") s.q.schedule.shape = hopsat::ScheduleShape::linear;
    else if (shape == "geometric") s.q.schedule.shape = hopsat::ScheduleShape::geometric;
    else throw std::invalid_argument("schedule must be linear or geometric");
  } else if (key == "geometric_factor") {
    require(is_qubo, "geometric_factor applies to the qubo solver only");
    s.q.schedule.geometric_factor = value.get<double>();
  } else if (key == "schedule_steps") {
    require(is_qubo, "schedule_steps applies to the qubo solver only");
    s.q.schedule.total_steps = value.get<std::uint64_t>();
  } else if (key == "sat_check_period") {
    require(is_qubo, "sat_check_period applies to the qubo solver only");
    s.q.sat_check_period = value.get<std::uint64_t>();
  } else if (key == "metropolis") {
    require(is_qubo, "metropolis applies to the qubo solver only");
    s.q.metropolis = value.get<bool>();
  } else if (key == "e_offset_increment") {
    require(is_focus, "e_offset_increment applies to the pubo-focus solver only");
    s.p.e_offset_increment = value.get<double>();
  } else {
    return false;
  }
  return true;
}

SolveSpec parse_solve(const json& j, bool allow_bin_width) {
  require(j.is_object(), "config must be a JSON object");
  require(j.contains("solver"), "missing \"solver\"");
  SolveSpec s;
  s.id = solver_id(j.at("solver").get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "solver") continue;
    if (key == "seed") {
      s.q.seed = s.p.seed = value.get<std::uint64_t>();
    } else if (key == "max_steps") {
      s.q.max_steps = s.p.max_steps = value.get<std::uint64_t>();
    } else if (key == "record_trace") {
      s.q.record_trace = s.p.record_trace = value.get<bool>();
    } else if (key == "recompute_interval") {
      s.q.recompute_interval = s.p.recompute_interval = value.get<std::uint64_t>();
    } else if (allow_bin_width && key == "bin_width") {
      s.bin_width = value.get<double>();
    } else if (!apply_solver_key(s, key, value)) {
      throw std::invalid_argument("unknown solve config key: " + key);
    }
  }
  return s;
}

hopsat::BenchSolverConfig parse_bench_solver(const json& j) {
  require(j.is_object(), "solver entry must be a JSON object");
  require(j.contains("name"), "solver entry missing \"name\"");
  SolveSpec s;
  s.id = solver_id(j.at("name").get<std::string>());
  for (const auto& [key, value] : j.items()) {
    if (key == "name") continue;
    if (key == "sat_check_period" || key == "metropolis" || key == "n_groups" ||
        key == "t_initial" || key == "schedule" || key == "geometric_factor" ||
        key == "schedule_steps" || key == "penalty_P" || key == "e_offset_increment") {
      apply_solver_key(s, key, value);
    } else {
      throw std::invalid_argument("unknown bench solver key: " + key);
    }
  }
  hopsat::BenchSolverConfig out;
  out.id = s.id;
  out.penalty = s.penalty;
  out.qubo = s.q;
  out.pubo = s.p;
  return out;
}

hopsat::BenchConfig parse_bench(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  hopsat::BenchConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "master_seed") {
      c.master_seed = value.get<std::uint64_t>();
    } else if (key == "jobs") {
      c.jobs = value.get<std::uint32_t>();
    } else if (key == "tuning_note") {
      c.tuning_note = value.get<std::string>();
    } else if (key == "tts") {
      for (const auto& [tk, tv] : value.items()) {
        if (tk == "target") c.tts.target = tv.get<double>();
        else if (tk == "n_runs") c.tts.n_runs = tv.get<std::uint32_t>();
        else if (tk == "max_steps") c.tts.max_steps = tv.get<std::uint64_t>();
        else throw std::invalid_argument("unknown tts key: " + tk);
      }
    } else if (key == "cost_model") {
      c.cost = hopsat::cost_model_from_json(value.dump());
    } else if (key == "solvers") {
      require(value.is_array(), "solvers must be an array");
      for (const auto& entry : value) c.solvers.push_back(parse_bench_solver(entry));
    } else {
      throw std::invalid_argument("unknown bench config key: " + key);
    }
  }
  require(!c.solvers.empty(), "bench config needs at least one solver");
  return c;
}

struct LandscapeSpec {
  hopsat::LandscapeJobConfig cfg;
  bool dump_valleys = false;
  std::uint32_t jobs = 0;
};

LandscapeSpec parse_landscape(const json& j) {
  require(j.is_object(), "config must be a JSON object");
  LandscapeSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") s.cfg.seed = value.get<std::uint64_t>();
    else if (key == "penalty_P") s.cfg.penalty = value.get<double>();
    else if (key == "temperatures") s.cfg.temperatures = value.get<std::vector<double>>();
    else if (key == "mode") {
      const std::string m = value.get<std::string>();
      if (m == "threshold") s.cfg.mode = hopsat::ConnectMode::threshold;
      else if (m == "bernoulli") s.cfg.mode = hopsat::ConnectMode::bernoulli;
      else throw std::invalid_argument("mode must be threshold or bernoulli");
    } else if (key == "p_min") s.cfg.p_min = value.get<double>();
    else if (key == "max_levels") s.cfg.max_levels = value.get<std::uint32_t>();
    else if (key == "n_valleys") s.cfg.n_valleys = value.get<std::uint32_t>();
    else if (key == "exhaustive_limit") s.cfg.exhaustive_limit = value.get<std::uint32_t>();
    else if (key == "force_gwl") s.cfg.force_gwl = value.get<bool>();
    else if (key == "bin_width") s.cfg.bin_width = value.get<double>();
    else if (key == "dump_valleys") s.dump_valleys = value.get<bool>();
    else if (key == "jobs") s.jobs = value.get<std::uint32_t>();
    else if (key == "gwl") {
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "lnf_initial") s.cfg.gwl.lnf_initial = gv.get<double>();
        else if (gk == "lnf_final") s.cfg.gwl.lnf_final = gv.get<double>();
        else if (gk == "flatness") s.cfg.gwl.flatness = gv.get<double>();
        else if (gk == "flatness_check_interval")
          s.cfg.gwl.flatness_check_interval = gv.get<std::uint64_t>();
        else if (gk == "max_flat_steps") s.cfg.gwl.max_flat_steps = gv.get<std::uint64_t>();
        else if (gk == "production_steps") s.cfg.gwl.production_steps = gv.get<std::uint64_t>();
        else if (gk == "valley_size_cap") s.cfg.gwl.valley_size_cap = gv.get<std::uint64_t>();
        else if (gk == "window_margin") s.cfg.gwl.window_margin = gv.get<double>();
        else throw std::invalid_argument("unknown gwl key: " + gk);
      }
    } else {
      throw std::invalid_argument("unknown landscape config key: " + key);
    }
  }
  return s;
}

hopsat::RunResult dispatch_solve(const hopsat::CnfFormula& f, const SolveSpec& s) {
  if (s.id == hopsat::SolverId::qubo) {
    const hopsat::QuboModel m = hopsat::quadratize(f, s.penalty);
    return hopsat::run_qubo(f, m, s.q);
  }
  const hopsat::PuboEnergy m = hopsat::pubo_from_cnf(f);
  hopsat::PuboSolverConfig pc = s.p;
  pc.rule = s.id == hopsat::SolverId::pubo_classic ? hopsat::PuboRule::classic
                                                   : hopsat::PuboRule::focus_offset;
  return pc.rule == hopsat::PuboRule::classic ? hopsat::run_pubo_classic(f, m, pc)
                                              : hopsat::run_pubo_focus_offset(f, m, pc);
}

}  // namespace

const char* hopsat_version(void) { return "0.1.0"; }

const char* hopsat_last_error(void) { return g_error.c_str(); }

void hopsat_string_free(char* s) { std::free(s); }

uint64_t hopsat_mix_seed(uint64_t seed, uint64_t word) { return hopsat::derive_seed(seed, {word}); }

hopsat_status hopsat_formula_parse(const char* dimacs_text, hopsat_formula** out) {
  return guard([&] {
    require(dimacs_text && out, "null argument");
    *out = new hopsat_formula{hopsat::parse_dimacs(dimacs_text)};
  });
}

hopsat_status hopsat_formula_generate(uint32_t n_vars, double ratio, uint64_t seed,
                                      int distinct_clauses, hopsat_formula** out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    hopsat::GeneratorOptions opts;
    opts.distinct_clauses = distinct_clauses != 0;
    *out = new hopsat_formula{hopsat::generate_random_3sat(n_vars, ratio, seed, opts)};
  });
}

void hopsat_formula_free(hopsat_formula* f) { delete f; }

uint32_t hopsat_formula_n_vars(const hopsat_formula* f) { return f ? f->f.n_vars : 0; }

uint32_t hopsat_formula_n_clauses(const hopsat_formula* f) { return f ? f->f.n_clauses() : 0; }

hopsat_status hopsat_formula_dimacs(const hopsat_formula* f, char** out_text) {
  return guard([&] {
    require(f && out_text, "null argument");
    *out_text = dup_string(hopsat::write_dimacs(f->f));
  });
}

hopsat_status hopsat_formula_count_unsat(const hopsat_formula* f, const uint8_t* bits,
                                         size_t n_bits, uint32_t* out) {
  return guard([&] {
    require(f && out, "null argument");
    *out = hopsat::count_unsat(f->f, to_assignment(bits, n_bits));
  });
}

hopsat_status hopsat_pubo_compile(const hopsat_formula* f, hopsat_pubo** out) {
  return guard([&] {
    require(f && out, "null argument");
    *out = new hopsat_pubo{hopsat::pubo_from_cnf(f->f)};
  });
}

void hopsat_pubo_free(hopsat_pubo* m) { delete m; }

uint32_t hopsat_pubo_n_vars(const hopsat_pubo* m) { return m ? m->m.n_vars() : 0; }

hopsat_status hopsat_pubo_energy(const hopsat_pubo* m, const uint8_t* bits, size_t n_bits,
                                 double* out) {
  return guard([&] {
    require(m && out, "null argument");
    *out = m->m.energy(to_assignment(bits, n_bits));
  });
}

hopsat_status hopsat_pubo_to_json(const hopsat_pubo* m, char** out_text) {
  return guard([&] {
    require(m && out_text, "null argument");
    *out_text = dup_string(hopsat::pubo_to_json(m->m));
  });
}

hopsat_status hopsat_qubo_compile(const hopsat_formula* f, double penalty, hopsat_qubo** out) {
  return guard([&] {
    require(f && out, "null argument");
    *out = new hopsat_qubo{hopsat::quadratize(f->f, penalty)};
  });
}

void hopsat_qubo_free(hopsat_qubo* m) { delete m; }

uint32_t hopsat_qubo_n_vars(const hopsat_qubo* m) { return m ? m->m.n_total() : 0; }

uint32_t hopsat_qubo_n_aux(const hopsat_qubo* m) { return m ? m->m.n_aux : 0; }

hopsat_status hopsat_qubo_energy(const hopsat_qubo* m, const uint8_t* bits, size_t n_bits,
                                 double* out) {
  return guard([&] {
    require(m && out, "null argument");
    *out = m->m.energy(to_assignment(bits, n_bits));
  });
}

hopsat_status hopsat_qubo_min_over_aux(const hopsat_qubo* m, const uint8_t* bits, size_t n_bits,
                                       double* out_energy, uint8_t* out_aux) {
  return guard([&] {
    require(m && out_energy, "null argument");
    auto [energy, aux] = hopsat::min_over_aux(m->m, to_assignment(bits, n_bits));
    *out_energy = energy;
    if (out_aux) std::memcpy(out_aux, aux.data(), aux.size());
  });
}

hopsat_status hopsat_qubo_to_json(const hopsat_qubo* m, char** out_text) {
  return guard([&] {
    require(m && out_text, "null argument");
    *out_text = dup_string(hopsat::qubo_to_json(m->m));
  });
}

hopsat_status hopsat_solve(const hopsat_formula* f, const char* config_json, char** result_json,
                           char** trace_csv) {
  return guard([&] {
    require(f && config_json && result_json, "null argument");
    const SolveSpec s = parse_solve(json::parse(config_json), false);
    const hopsat::RunResult res = dispatch_solve(f->f, s);
    *result_json = dup_string(hopsat::result_to_json(res, hopsat::solver_name(s.id)));
    if (trace_csv) *trace_csv = dup_string(hopsat::trace_to_csv(res));
  });
}

hopsat_status hopsat_bench(const hopsat_formula* const* formulas, const char* const* names,
                           size_t n, const char* config_json, char** report_json,
                           char** medians_csv) {
  return guard([&] {
    require(formulas && names && config_json && report_json && medians_csv, "null argument");
    require(n > 0, "no instances");
    std::vector<hopsat::BenchInstance> instances;
    instances.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      require(formulas[i] && names[i], "null instance");
      instances.push_back(hopsat::BenchInstance{names[i], formulas[i]->f});
    }
    const hopsat::BenchConfig cfg = parse_bench(json::parse(config_json));
    const hopsat::BenchReport report = hopsat::run_benchmark(instances, cfg);
    *report_json = dup_string(hopsat::report_to_json(report));
    *medians_csv = dup_string(hopsat::medians_to_csv(report));
  });
}

hopsat_status hopsat_landscape(const hopsat_formula* const* formulas, const char* const* names,
                               size_t n, const char* config_json, char** stats_csv,
                               char** stats_json) {
  return guard([&] {
    require(formulas && names && config_json && stats_csv && stats_json, "null argument");
    require(n > 0, "no instances");
    for (size_t i = 0; i < n; ++i) require(formulas[i] && names[i], "null instance");
    const LandscapeSpec spec = parse_landscape(json::parse(config_json));

    std::vector<hopsat::InstanceLandscape> results(n);
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    std::string first_error;
    auto worker = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          results[i] = hopsat::analyze_instance(formulas[i]->f, names[i], spec.cfg);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (first_error.empty())
            first_error = std::string("instance ") + names[i] + ": " + e.what();
          failed.store(true);
          return;
        }
      }
    };
    std::uint32_t n_threads =
        spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::uint32_t(std::min<size_t>(n_threads, n));
    std::vector<std::thread> pool;
    for (std::uint32_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error(first_error);

    *stats_csv = dup_string(hopsat::landscape_csv(results, spec.cfg));
    *stats_json = dup_string(hopsat::landscape_json(results, spec.cfg, spec.dump_valleys));
  });
}

hopsat_status hopsat_delta_histogram(const hopsat_formula* f, const char* config_json,
                                     char** hist_csv, char** hist_json) {
  return guard([&] {
    require(f && config_json && hist_csv && hist_json, "null argument");
    const SolveSpec s = parse_solve(json::parse(config_json), true);
    require(s.id == hopsat::SolverId::qubo, "delta histogram requires the qubo solver");
    const hopsat::QuboModel m = hopsat::quadratize(f->f, s.penalty);
    const hopsat::DeltaHistogram h =
        hopsat::delta_correlation_histogram(f->f, m, s.q, s.bin_width);
    *hist_csv = dup_string(hopsat::hist_to_csv(h));
    *hist_json = dup_string(hopsat::hist_to_json(h));
  });
}

hopsat_status hopsat_tts_steps(double p_hat, uint64_t max_steps, double target, double* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = hopsat::tts_steps(p_hat, max_steps, target);
  });
}

hopsat_status hopsat_tiles_required(uint32_t n_vars, uint32_t n_col, uint32_t* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = hopsat::tiles_required(n_vars, n_col);
  });
}

hopsat_status hopsat_pubo_wordlines(uint32_t n_vars, uint64_t* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = hopsat::pubo_wordlines(n_vars);
  });
}

hopsat_status hopsat_search_space_bits(uint32_t n_vars, uint32_t n_clauses, int quadratized,
                                       uint32_t* out) {
  return guard([&] {
    require(out != nullptr, "null argument");
    *out = hopsat::search_space_bits(
        n_vars, n_clauses,
        quadratized ? hopsat::Representation::quadratized : hopsat::Representation::native);
  });
}
