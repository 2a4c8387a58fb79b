// Command-line front end; all functionality comes through the shared
// library's C API.
#include <glob.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hopsat/hopsat.h"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// exit codes: 0 solved/success, 10 budget exhausted unsolved, 2 bad
// config/input, 1 I/O failure
constexpr int kExitUnsolved = 10;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 1;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(hopsat_status s) {
  switch (s) {
    case HOPSAT_OK: return 0;
    case HOPSAT_ERR_PARSE:
    case HOPSAT_ERR_INVALID: return kExitConfig;
    default: return kExitIo;
  }
}

void check(hopsat_status s, const std::string& context) {
  if (s != HOPSAT_OK) throw CliError{exit_code_for(s), context + ": " + hopsat_last_error()};
}

struct CStr {
  char* p = nullptr;
  ~CStr() { hopsat_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct Formula {
  hopsat_formula* h = nullptr;
  Formula() = default;
  Formula(Formula&& o) noexcept : h(o.h) { o.h = nullptr; }
  Formula& operator=(Formula&& o) noexcept {
    std::swap(h, o.h);
    return *this;
  }
  Formula(const Formula&) = delete;
  ~Formula() { hopsat_formula_free(h); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kExitIo, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw CliError{kExitIo, "read failed: " + path};
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{kExitIo, "cannot write " + path};
  out << text;
  if (!out) throw CliError{kExitIo, "write failed: " + path};
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError{kExitIo, "cannot create directory " + dir + ": " + ec.message()};
}

Formula load_formula(const std::string& path) {
  const std::string text = read_file(path);
  Formula f;
  check(hopsat_formula_parse(text.c_str(), &f.h), path);
  return f;
}

std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const std::string& pattern : patterns) {
    glob_t g{};
    if (glob(pattern.c_str(), 0, nullptr, &g) == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    globfree(&g);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw CliError{kExitConfig, "no instances match the given paths"};
  return out;
}

std::string fmt_num(double v) { return json(v).dump(); }

// ---- gen ----

struct GenArgs {
  std::uint32_t n_vars = 50;
  double ratio = 4.23;
  std::uint32_t count = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
  bool distinct = false;
};

void run_gen(const GenArgs& a, const std::string& resolved) {
  ensure_dir(a.out_dir);
  write_file((fs::path(a.out_dir) / "gen.resolved.cfg").string(), resolved);
  for (std::uint32_t i = 0; i < a.count; ++i) {
    Formula f;
    check(hopsat_formula_generate(a.n_vars, a.ratio, hopsat_mix_seed(a.seed, i),
                                  a.distinct ? 1 : 0, &f.h),
          "generate");
    CStr text;
    check(hopsat_formula_dimacs(f.h, &text.p), "serialize");
    char idx[8];
    std::snprintf(idx, sizeof idx, "%03u", i);
    const std::string name = "rand3sat_n" + std::to_string(a.n_vars) + "_r" + fmt_num(a.ratio) +
                             "_s" + std::to_string(a.seed) + "_i" + idx + ".cnf";
    write_file((fs::path(a.out_dir) / name).string(), text.str());
  }
}

// ---- convert ----

struct ConvertArgs {
  std::string input;
  std::string form = "pubo";
  double penalty = 1.0;
  std::string out;
};

void run_convert(const ConvertArgs& a, const std::string& resolved) {
  Formula f = load_formula(a.input);
  CStr text;
  if (a.form == "pubo") {
    hopsat_pubo* m = nullptr;
    check(hopsat_pubo_compile(f.h, &m), a.input);
    const hopsat_status s = hopsat_pubo_to_json(m, &text.p);
    hopsat_pubo_free(m);
    check(s, "serialize");
  } else {
    hopsat_qubo* m = nullptr;
    check(hopsat_qubo_compile(f.h, a.penalty, &m), a.input);
    const hopsat_status s = hopsat_qubo_to_json(m, &text.p);
    hopsat_qubo_free(m);
    check(s, "serialize");
  }
  if (a.out.empty()) {
    std::cout << text.str();
    std::cerr << resolved;
  } else {
    write_file(a.out, text.str());
    write_file(a.out + ".resolved.cfg", resolved);
  }
}

// ---- solve ----

struct SolveArgs {
  std::string input;
  std::string solver = "qubo";
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 10000;
  std::uint64_t recompute_interval = 10000;
  double penalty = 1.0;
  std::uint32_t n_groups = 8;
  double t_initial = 2.0;
  std::string schedule = "linear";
  double geometric_factor = 0.995;
  std::uint64_t schedule_steps = 0;
  std::uint64_t sat_check_period = 1;
  bool metropolis = false;
  double e_offset_increment = 0.5;
  std::string trace_path;
  std::string hist_path;
  std::string out;
};

json solver_config_json(const SolveArgs& a) {
  json cfg;
  cfg["solver"] = a.solver;
  cfg["seed"] = a.seed;
  cfg["max_steps"] = a.max_steps;
  cfg["recompute_interval"] = a.recompute_interval;
  cfg["record_trace"] = !a.trace_path.empty();
  if (a.solver == "qubo") {
    cfg["penalty_P"] = a.penalty;
    cfg["n_groups"] = a.n_groups;
    cfg["t_initial"] = a.t_initial;
    cfg["schedule"] = a.schedule;
    cfg["geometric_factor"] = a.geometric_factor;
    cfg["schedule_steps"] = a.schedule_steps;
    cfg["sat_check_period"] = a.sat_check_period;
    cfg["metropolis"] = a.metropolis;
  } else if (a.solver == "pubo-focus") {
    cfg["e_offset_increment"] = a.e_offset_increment;
  }
  return cfg;
}

int run_solve(const SolveArgs& a, const std::string& resolved) {
  Formula f = load_formula(a.input);
  const json cfg = solver_config_json(a);
  CStr result, trace;
  check(hopsat_solve(f.h, cfg.dump().c_str(), &result.p, &trace.p), a.input);
  if (!a.trace_path.empty()) write_file(a.trace_path, trace.str());
  if (!a.hist_path.empty()) {
    if (a.solver != "qubo")
      throw CliError{kExitConfig, "--delta-hist requires --solver qubo"};
    json hcfg = cfg;
    hcfg.erase("record_trace");
    CStr hist_csv, hist_json;
    check(hopsat_delta_histogram(f.h, hcfg.dump().c_str(), &hist_csv.p, &hist_json.p),
          "delta histogram");
    write_file(a.hist_path, hist_csv.str());
  }
  if (a.out.empty()) {
    std::cout << result.str();
    std::cerr << resolved;
  } else {
    write_file(a.out, result.str());
    write_file(a.out + ".resolved.cfg", resolved);
  }
  const json parsed = json::parse(result.str());
  return parsed.at("solved").get<bool>() ? 0 : kExitUnsolved;
}

// ---- bench ----

struct BenchArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::uint64_t master_seed = 1;
  std::uint32_t n_runs = 100;
  std::uint64_t max_steps = 10000;
  double target = 0.99;
  std::uint32_t jobs = 0;
  std::vector<std::string> solvers{"qubo", "pubo-classic", "pubo-focus"};
  double penalty = 1.0;
  std::uint32_t n_groups = 8;
  double t_initial = 2.0;
  std::string schedule = "linear";
  double geometric_factor = 0.995;
  std::uint64_t schedule_steps = 0;
  std::uint64_t sat_check_period = 1;
  bool metropolis = false;
  double e_offset_increment = 0.5;
  std::string cost_config;
  double qubo_cycle_time_s = 1e-9;
  double qubo_cycle_energy_j = 1e-9;
  double pubo_time_factor = 1.35;
  double pubo_energy_divisor = 2.45;
  std::uint32_t n_col = 19;
  std::uint32_t n_wl = 400;
  double tile_time_coeff = 0.0;
  double tile_energy_coeff = 0.0;
  bool calibrated = false;
  std::string tuning_note =
      "defaults frozen on a disjoint 30-instance N=50 r=4.23 pool (generator seed 31415): "
      "qubo grid over n_groups/t_initial/schedule at the 10000-step budget, winner "
      "n_groups=8 t_initial=2.0 linear";
};

json bench_config_json(const BenchArgs& a) {
  json cfg;
  cfg["master_seed"] = a.master_seed;
  cfg["jobs"] = a.jobs;
  cfg["tts"] = json{{"target", a.target}, {"n_runs", a.n_runs}, {"max_steps", a.max_steps}};
  json cost;
  if (!a.cost_config.empty()) {
    cost = json::parse(read_file(a.cost_config));
  } else {
    cost["qubo_cycle_time_s"] = a.qubo_cycle_time_s;
    cost["qubo_cycle_energy_j"] = a.qubo_cycle_energy_j;
    cost["pubo_time_factor"] = a.pubo_time_factor;
    cost["pubo_energy_divisor"] = a.pubo_energy_divisor;
    cost["n_col"] = a.n_col;
    cost["n_wl"] = a.n_wl;
    cost["tile_time_coeff"] = a.tile_time_coeff;
    cost["tile_energy_coeff"] = a.tile_energy_coeff;
    cost["relative_only"] = !a.calibrated;
  }
  cfg["cost_model"] = std::move(cost);
  json solvers = json::array();
  for (const std::string& name : a.solvers) {
    json s;
    s["name"] = name;
    if (name == "qubo") {
      s["penalty_P"] = a.penalty;
      s["n_groups"] = a.n_groups;
      s["t_initial"] = a.t_initial;
      s["schedule"] = a.schedule;
      s["geometric_factor"] = a.geometric_factor;
      s["schedule_steps"] = a.schedule_steps;
      s["sat_check_period"] = a.sat_check_period;
      s["metropolis"] = a.metropolis;
    } else if (name == "pubo-focus") {
      s["e_offset_increment"] = a.e_offset_increment;
    }
    solvers.push_back(std::move(s));
  }
  cfg["solvers"] = std::move(solvers);
  cfg["tuning_note"] = a.tuning_note;
  return cfg;
}

void run_bench(const BenchArgs& a, const std::string& resolved) {
  const std::vector<std::string> paths = expand_globs(a.inputs);
  std::vector<Formula> formulas;
  formulas.reserve(paths.size());
  std::vector<const hopsat_formula*> handles;
  std::vector<const char*> names;
  for (const std::string& p : paths) formulas.push_back(load_formula(p));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    handles.push_back(formulas[i].h);
    names.push_back(paths[i].c_str());
  }
  const json cfg = bench_config_json(a);
  CStr report, csv;
  check(hopsat_bench(handles.data(), names.data(), handles.size(), cfg.dump().c_str(),
                     &report.p, &csv.p),
        "bench");
  ensure_dir(a.out_dir);
  write_file((fs::path(a.out_dir) / "report.json").string(), report.str());
  write_file((fs::path(a.out_dir) / "medians.csv").string(), csv.str());
  write_file((fs::path(a.out_dir) / "bench.resolved.cfg").string(), resolved);
}

// ---- landscape ----

struct LandscapeArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::vector<double> temperatures{0.05, 10.0};
  double penalty = 0.5;
  std::string mode = "threshold";
  double p_min = 0.5;
  std::uint64_t seed = 1;
  std::uint32_t max_levels = 5;
  std::uint32_t n_valleys = 200;
  std::uint32_t exhaustive_limit = 16;
  bool force_gwl = false;
  double bin_width = 0.01;
  bool dump_valleys = false;
  std::uint32_t jobs = 0;
  double gwl_lnf_initial = 1.0;
  double gwl_lnf_final = 1e-6;
  double gwl_flatness = 0.8;
  std::uint64_t gwl_check_interval = 10000;
  std::uint64_t gwl_max_flat_steps = 50'000'000;
  std::uint64_t gwl_production_steps = 0;
  std::uint64_t gwl_valley_size_cap = 1u << 20;
  double gwl_window_margin = 2.0;
};

json landscape_config_json(const LandscapeArgs& a) {
  json cfg;
  cfg["seed"] = a.seed;
  cfg["penalty_P"] = a.penalty;
  cfg["temperatures"] = a.temperatures;
  cfg["mode"] = a.mode;
  cfg["p_min"] = a.p_min;
  cfg["max_levels"] = a.max_levels;
  cfg["n_valleys"] = a.n_valleys;
  cfg["exhaustive_limit"] = a.exhaustive_limit;
  cfg["force_gwl"] = a.force_gwl;
  cfg["bin_width"] = a.bin_width;
  cfg["dump_valleys"] = a.dump_valleys;
  cfg["jobs"] = a.jobs;
  cfg["gwl"] = json{{"lnf_initial", a.gwl_lnf_initial},
                    {"lnf_final", a.gwl_lnf_final},
                    {"flatness", a.gwl_flatness},
                    {"flatness_check_interval", a.gwl_check_interval},
                    {"max_flat_steps", a.gwl_max_flat_steps},
                    {"production_steps", a.gwl_production_steps},
                    {"valley_size_cap", a.gwl_valley_size_cap},
                    {"window_margin", a.gwl_window_margin}};
  return cfg;
}

void run_landscape(const LandscapeArgs& a, const std::string& resolved) {
  const std::vector<std::string> paths = expand_globs(a.inputs);
  std::vector<Formula> formulas;
  formulas.reserve(paths.size());
  std::vector<const hopsat_formula*> handles;
  std::vector<const char*> names;
  for (const std::string& p : paths) formulas.push_back(load_formula(p));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    handles.push_back(formulas[i].h);
    names.push_back(paths[i].c_str());
  }
  const json cfg = landscape_config_json(a);
  CStr csv, out_json;
  check(hopsat_landscape(handles.data(), names.data(), handles.size(), cfg.dump().c_str(),
                         &csv.p, &out_json.p),
        "landscape");
  ensure_dir(a.out_dir);
  write_file((fs::path(a.out_dir) / "landscape.csv").string(), csv.str());
  write_file((fs::path(a.out_dir) / "landscape.json").string(), out_json.str());
  write_file((fs::path(a.out_dir) / "landscape.resolved.cfg").string(), resolved);
}

// Resolved-config sidecar: the subcommand's options (defaults included) under
// its section header, so the file can be replayed with --config.
std::string resolved_config(const CLI::App* sub) {
  return "[" + sub->get_name() + "]\n" + sub->config_to_str(true, true);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"3-SAT Hopfield-network solver and landscape analysis toolkit"};
  app.set_version_flag("--version", hopsat_version());
  app.require_subcommand(1);
  // Config files use one [section] per subcommand; the option lives on the
  // top-level app (CLI11 only processes the config there) and subcommands
  // fall through so a trailing "--config file" still reaches it.
  app.set_config("--config", "", "read options from a config file (one [section] per subcommand)");
  int exit_code = 0;

  GenArgs gen;
  CLI::App* sub_gen = app.add_subcommand("gen", "generate uniform random 3-SAT instances");
  sub_gen->fallthrough();
  sub_gen->add_option("-n,--n-vars", gen.n_vars, "variable count")->required();
  sub_gen->add_option("--ratio", gen.ratio, "clause/variable ratio")->capture_default_str();
  sub_gen->add_option("--count", gen.count, "number of instances")->required();
  sub_gen->add_option("--seed", gen.seed, "master seed")->capture_default_str();
  sub_gen->add_option("--out-dir", gen.out_dir, "output directory")->required();
  sub_gen->add_flag("--distinct-clauses", gen.distinct, "reject duplicate clauses");
  sub_gen->callback([&] { run_gen(gen, resolved_config(sub_gen)); });

  ConvertArgs conv;
  CLI::App* sub_conv = app.add_subcommand("convert", "compile a CNF file to an energy model");
  sub_conv->fallthrough();
  sub_conv->add_option("input", conv.input, "DIMACS CNF file")->required();
  sub_conv->add_option("--form", conv.form, "model form")->capture_default_str()
      ->check(CLI::IsMember({"pubo", "qubo"}));
  sub_conv->add_option("--penalty", conv.penalty, "quadratization penalty weight")->capture_default_str();
  sub_conv->add_option("-o,--out", conv.out, "output file (default: stdout)")->capture_default_str();
  sub_conv->callback([&] { run_convert(conv, resolved_config(sub_conv)); });

  SolveArgs solve;
  CLI::App* sub_solve = app.add_subcommand("solve", "run one seeded solver on one instance");
  sub_solve->fallthrough();
  sub_solve->add_option("input", solve.input, "DIMACS CNF file")->required();
  sub_solve->add_option("--solver", solve.solver, "solver")->capture_default_str()
      ->check(CLI::IsMember({"qubo", "pubo-classic", "pubo-focus"}));
  sub_solve->add_option("--seed", solve.seed, "run seed")->capture_default_str();
  sub_solve->add_option("--max-steps", solve.max_steps, "step budget")->capture_default_str();
  sub_solve->add_option("--recompute-interval", solve.recompute_interval,
                        "full-energy verification interval")->capture_default_str();
  sub_solve->add_option("--penalty", solve.penalty, "quadratization penalty (qubo)")->capture_default_str();
  sub_solve->add_option("--n-groups", solve.n_groups, "update groups per step (qubo)")->capture_default_str();
  sub_solve->add_option("--t-initial", solve.t_initial, "initial noise temperature (qubo)")->capture_default_str();
  sub_solve->add_option("--schedule", solve.schedule, "annealing shape (qubo)")->capture_default_str()
      ->check(CLI::IsMember({"linear", "geometric"}));
  sub_solve->add_option("--geometric-factor", solve.geometric_factor,
                        "per-step decay for geometric schedules (qubo)")->capture_default_str();
  sub_solve->add_option("--schedule-steps", solve.schedule_steps,
                        "steps to reach zero temperature; 0 = max-steps (qubo)")->capture_default_str();
  sub_solve->add_option("--sat-check-period", solve.sat_check_period,
                        "steps between satisfaction checks (qubo)")->capture_default_str();
  sub_solve->add_flag("--metropolis", solve.metropolis,
                      "Metropolis acceptance instead of additive noise (qubo)");
  sub_solve->add_option("--e-offset-increment", solve.e_offset_increment,
                        "escape accumulator increment (pubo-focus)")->capture_default_str();
  sub_solve->add_option("--trace", solve.trace_path, "write per-step CSV trace to this file")->capture_default_str();
  sub_solve->add_option("--delta-hist", solve.hist_path,
                        "write accepted-flip (-dE, dSAT) histogram CSV (qubo)")->capture_default_str();
  sub_solve->add_option("-o,--out", solve.out, "result file (default: stdout)")->capture_default_str();
  sub_solve->callback(
      [&] { exit_code = run_solve(solve, resolved_config(sub_solve)); });

  BenchArgs bench;
  CLI::App* sub_bench = app.add_subcommand("bench", "multi-instance multi-seed TTS/ETS report");
  sub_bench->fallthrough();
  sub_bench->add_option("instances", bench.inputs, "instance files or glob patterns")->required();
  sub_bench->add_option("--out-dir", bench.out_dir, "output directory")->required();
  sub_bench->add_option("--master-seed", bench.master_seed, "master seed")->capture_default_str();
  sub_bench->add_option("--runs", bench.n_runs, "seeded runs per instance and solver")->capture_default_str();
  sub_bench->add_option("--max-steps", bench.max_steps, "step budget per run")->capture_default_str();
  sub_bench->add_option("--target", bench.target, "success probability target")->capture_default_str();
  sub_bench->add_option("--jobs", bench.jobs, "worker threads (0 = hardware)")->capture_default_str();
  sub_bench->add_option("--solvers", bench.solvers, "solvers to benchmark")->capture_default_str()
      ->delimiter(',')
      ->check(CLI::IsMember({"qubo", "pubo-classic", "pubo-focus"}));
  sub_bench->add_option("--penalty", bench.penalty, "quadratization penalty (qubo)")->capture_default_str();
  sub_bench->add_option("--n-groups", bench.n_groups, "update groups per step (qubo)")->capture_default_str();
  sub_bench->add_option("--t-initial", bench.t_initial, "initial noise temperature (qubo)")->capture_default_str();
  sub_bench->add_option("--schedule", bench.schedule, "annealing shape (qubo)")->capture_default_str()
      ->check(CLI::IsMember({"linear", "geometric"}));
  sub_bench->add_option("--geometric-factor", bench.geometric_factor,
                        "per-step decay for geometric schedules (qubo)")->capture_default_str();
  sub_bench->add_option("--schedule-steps", bench.schedule_steps,
                        "steps to reach zero temperature; 0 = max-steps (qubo)")->capture_default_str();
  sub_bench->add_option("--sat-check-period", bench.sat_check_period,
                        "steps between satisfaction checks (qubo)")->capture_default_str();
  sub_bench->add_flag("--metropolis", bench.metropolis,
                      "Metropolis acceptance instead of additive noise (qubo)");
  sub_bench->add_option("--e-offset-increment", bench.e_offset_increment,
                        "escape accumulator increment (pubo-focus)")->capture_default_str();
  sub_bench->add_option("--cost-config", bench.cost_config,
                        "JSON cost model file (overrides the cost flags)")->capture_default_str();
  sub_bench->add_option("--qubo-cycle-time-s", bench.qubo_cycle_time_s,
                        "seconds per quadratic cycle")->capture_default_str();
  sub_bench->add_option("--qubo-cycle-energy-j", bench.qubo_cycle_energy_j,
                        "joules per quadratic cycle")->capture_default_str();
  sub_bench->add_option("--pubo-time-factor", bench.pubo_time_factor,
                        "cubic cycle time multiplier")->capture_default_str();
  sub_bench->add_option("--pubo-energy-divisor", bench.pubo_energy_divisor,
                        "cubic cycle energy divisor")->capture_default_str();
  sub_bench->add_option("--n-col", bench.n_col, "state variables per tile")->capture_default_str();
  sub_bench->add_option("--n-wl", bench.n_wl, "wordlines per tile")->capture_default_str();
  sub_bench->add_option("--tile-time-coeff", bench.tile_time_coeff,
                        "per-extra-tile cycle time growth")->capture_default_str();
  sub_bench->add_option("--tile-energy-coeff", bench.tile_energy_coeff,
                        "per-extra-tile cycle energy growth")->capture_default_str();
  sub_bench->add_flag("--calibrated", bench.calibrated,
                      "mark cycle costs as calibrated absolute values");
  sub_bench->add_option("--tuning-note", bench.tuning_note,
                        "hyperparameter provenance echoed into the report")->capture_default_str();
  sub_bench->callback([&] { run_bench(bench, resolved_config(sub_bench)); });

  LandscapeArgs land;
  CLI::App* sub_land = app.add_subcommand("landscape", "valley structure and connectivity stats");
  sub_land->fallthrough();
  sub_land->add_option("instances", land.inputs, "instance files or glob patterns")->required();
  sub_land->add_option("--out-dir", land.out_dir, "output directory")->required();
  sub_land->add_option("-T,--temperatures", land.temperatures, "temperature sweep")->capture_default_str()
      ->delimiter(',');
  sub_land->add_option("-P,--penalty", land.penalty, "quadratization penalty")->capture_default_str();
  sub_land->add_option("--mode", land.mode, "edge acceptance rule")->capture_default_str()
      ->check(CLI::IsMember({"threshold", "bernoulli"}));
  sub_land->add_option("--p-min", land.p_min, "threshold-mode edge cutoff")->capture_default_str();
  sub_land->add_option("--seed", land.seed, "master seed")->capture_default_str();
  sub_land->add_option("--max-levels", land.max_levels, "energy levels to keep")->capture_default_str();
  sub_land->add_option("--n-valleys", land.n_valleys, "sampler valley target")->capture_default_str();
  sub_land->add_option("--exhaustive-limit", land.exhaustive_limit,
                       "use the full sweep up to this variable count")->capture_default_str();
  sub_land->add_flag("--force-gwl", land.force_gwl, "always use the sampler");
  sub_land->add_option("--bin-width", land.bin_width, "entropy bin width")->capture_default_str();
  sub_land->add_flag("--dump-valleys", land.dump_valleys,
                     "include full valley memberships in the JSON output");
  sub_land->add_option("--jobs", land.jobs, "worker threads (0 = hardware)")->capture_default_str();
  sub_land->add_option("--gwl-lnf-initial", land.gwl_lnf_initial,
                       "initial log modification factor")->capture_default_str();
  sub_land->add_option("--gwl-lnf-final", land.gwl_lnf_final,
                       "terminate refinement below this factor")->capture_default_str();
  sub_land->add_option("--gwl-flatness", land.gwl_flatness, "histogram flatness fraction")->capture_default_str();
  sub_land->add_option("--gwl-check-interval", land.gwl_check_interval,
                       "steps between flatness checks")->capture_default_str();
  sub_land->add_option("--gwl-max-flat-steps", land.gwl_max_flat_steps,
                       "cap on density-of-states steps")->capture_default_str();
  sub_land->add_option("--gwl-production-steps", land.gwl_production_steps,
                       "production walk length (0 = scaled from size)")->capture_default_str();
  sub_land->add_option("--gwl-valley-size-cap", land.gwl_valley_size_cap,
                       "plateau expansion size cap")->capture_default_str();
  sub_land->add_option("--gwl-window-margin", land.gwl_window_margin,
                       "energy window margin above the random-assignment mean")->capture_default_str();
  sub_land->callback([&] { run_landscape(land, resolved_config(sub_land)); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return exit_code;
}
