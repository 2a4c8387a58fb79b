// Acceptance gate: prints one PASS/FAIL line per numbered criterion and
// exits nonzero if any fail. Criterion 9 drives the installed CLI binary
// (path in the HOPSAT_CLI environment variable); everything else goes
// through the library.
#include <sys/wait.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bench.hpp"
#include "cnf.hpp"
#include "energy.hpp"
#include "landscape.hpp"
#include "rng.hpp"
#include "solvers.hpp"

using namespace hopsat;
namespace fs = std::filesystem;

namespace {

// Frozen benchmark defaults; the tuning protocol is documented in the README
// and the values are mirrored by the CLI.
constexpr std::uint32_t kQuboGroups = 8;
constexpr double kQuboTInitial = 2.0;
constexpr std::uint64_t kBenchMaxSteps = 10000;

struct Tally {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& msg) {
    if (!ok) failures.push_back(msg);
  }
};

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return derive_seed(a, {b}); }

Assignment from_mask(std::uint64_t mask, std::uint32_t n) {
  Assignment x(n);
  for (std::uint32_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
  return x;
}

using Fingerprint = std::multiset<std::pair<double, std::vector<std::uint64_t>>>;

Fingerprint fingerprint(const std::vector<Valley>& vs) {
  Fingerprint out;
  for (const Valley& v : vs) out.insert({v.energy, v.configs});
  return out;
}

// Reference transition probability by full enumeration of the auxiliaries.
double brute_force_transition(const QuboModel& m, const Assignment& x_a, const Assignment& x_b,
                              double temperature) {
  double native = 0.0;
  for (const auto& rec : m.aux_map)
    native += rec.a.value(x_a) * rec.b.value(x_a) * rec.third.value(x_a);
  Assignment sa(m.n_total()), sb(m.n_total());
  for (std::uint32_t i = 0; i < m.n_orig; ++i) {
    sa[i] = x_a[i];
    sb[i] = x_b[i];
  }
  double sum = 0.0;
  std::uint64_t count = 0;
  for (std::uint64_t y = 0; y < (1ull << m.n_aux); ++y) {
    for (std::uint32_t j = 0; j < m.n_aux; ++j) sa[m.n_orig + j] = sb[m.n_orig + j] = (y >> j) & 1u;
    if (m.energy(sa) != native) continue;
    ++count;
    const double de = m.energy(sb) - m.energy(sa);
    sum += temperature > 0.0 ? std::exp(-de / temperature) : (de <= 0.0 ? 1.0 : 0.0);
  }
  return count ? sum / double(count) : -1.0;
}

// The ten small instances shared by criteria 4 and 5.
std::vector<CnfFormula> small_landscape_instances() {
  std::vector<CnfFormula> out;
  const std::pair<std::uint32_t, int> sizes[] = {{10, 2}, {12, 3}, {14, 3}, {16, 2}};
  int k = 0;
  for (const auto& [n, reps] : sizes)
    for (int i = 0; i < reps; ++i) out.push_back(generate_random_3sat(n, 4.23, mix(500, k++)));
  return out;
}

// ---- criteria ----

void criterion_pubo_faithfulness(Tally& t) {
  for (std::uint32_t n : {8u, 12u, 16u}) {
    for (int i = 0; i < 10; ++i) {
      const CnfFormula f = generate_random_3sat(n, 4.23, mix(1000 + n, i));
      const PuboEnergy model = pubo_from_cnf(f);
      Assignment x(n, 0);
      IncrementalState inc(model.poly, x);
      ClauseSatTracker sat(f, x);
      bool ok = inc.energy() == double(sat.unsat());
      for (std::uint64_t step = 1; step < (1ull << n) && ok; ++step) {
        const auto bit = std::uint32_t(std::countr_zero(step));
        inc.flip(bit);
        x[bit] ^= 1;
        sat.flipped(bit, x[bit] != 0);
        ok = inc.energy() == double(sat.unsat());
      }
      t.expect(ok, "energy != clause count on exhaustive sweep, N=" + std::to_string(n) +
                       " instance " + std::to_string(i));
    }
  }
  for (int i = 0; i < 10; ++i) {
    const CnfFormula f = generate_random_3sat(50, 4.36, mix(7000, i));
    const PuboEnergy model = pubo_from_cnf(f);
    Xoshiro256ss rng(mix(9000, i));
    bool ok = true;
    for (int k = 0; k < 10000 && ok; ++k) {
      Assignment x(50);
      for (auto& b : x) b = std::uint8_t(rng.bounded(2));
      ok = model.energy(x) == double(count_unsat(f, x));
    }
    t.expect(ok, "energy != clause count on random assignments, instance " + std::to_string(i));
  }
}

void criterion_quadratization(Tally& t) {
  for (std::uint32_t n : {8u, 10u, 12u}) {
    for (int i = 0; i < 3; ++i) {
      const CnfFormula f = generate_random_3sat(n, 4.23, mix(1100 + n, i));
      const PuboEnergy pubo = pubo_from_cnf(f);
      const QuboModel qubo = quadratize(f, 1.0);
      bool ok = true;
      for (std::uint64_t m = 0; m < (1ull << n) && ok; ++m) {
        const Assignment x = from_mask(m, n);
        ok = min_over_aux(qubo, x).first == pubo.energy(x);
      }
      t.expect(ok, "min-over-aux != cubic energy at unit penalty, N=" + std::to_string(n) +
                       " instance " + std::to_string(i));
    }
  }

  // Half penalty dips below the true clause count on the worked example.
  CnfFormula g;
  g.n_vars = 4;
  g.clauses.resize(2);
  g.clauses[0].literals = {{0, true}, {1, false}, {2, false}};
  g.clauses[1].literals = {{0, false}, {2, false}, {3, false}};
  const QuboModel half = quadratize(g, 0.5);
  const PuboEnergy cubic = pubo_from_cnf(g);
  const Assignment x = {1, 0, 0, 0};
  const double relaxed = min_over_aux(half, x).first;
  t.expect(relaxed == 0.5, "half-penalty relaxed minimum is not 0.5");
  t.expect(cubic.energy(x) == 1.0, "worked example does not have one unsatisfied clause");
  t.expect(relaxed < cubic.energy(x), "relaxed minimum does not dip below the clause count");
}

void criterion_transition_probability(Tally& t) {
  int pairs = 0;
  for (int i = 0; i < 5; ++i) {
    const CnfFormula f = generate_random_3sat(8, 2.5, mix(1200, i));  // 20 clauses
    const PuboEnergy pubo = pubo_from_cnf(f);
    const QuboModel model = quadratize(f, 1.0);
    int pairs_here = 0;
    for (std::uint64_t m = 0; m < 256 && pairs_here < 4; ++m) {
      const Assignment xa = from_mask(m, 8);
      for (std::uint32_t bit = 0; bit < 8 && pairs_here < 4; ++bit) {
        if (flip_delta(pubo.poly, xa, bit).delta_e != 0.0) continue;
        const Assignment xb = from_mask(m ^ (1ull << bit), 8);
        for (double temp : {0.05, 1.0, 10.0}) {
          const TransitionEstimate est = qubo_transition_prob(model, xa, xb, temp);
          const double ref = brute_force_transition(model, xa, xb, temp);
          t.expect(std::fabs(est.p_raw - ref) <= 1e-12,
                   "factorized p deviates from enumeration at T=" + std::to_string(temp));
        }
        ++pairs_here;
      }
    }
    pairs += pairs_here;
  }
  t.expect(pairs >= 20, "found only " + std::to_string(pairs) + " iso-energy pairs");
}

void criterion_sampler(Tally& t) {
  const auto instances = small_landscape_instances();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const PuboEnergy model = pubo_from_cnf(instances[i]);
    const auto exact = discard_saddles(enumerate_valleys_exhaustive(model, 5));
    GwlConfig cfg;
    cfg.seed = mix(4000, i);
    const GwlResult got = gwl_sample_valleys(model, cfg);
    t.expect(fingerprint(discard_saddles(got.valleys)) == fingerprint(exact),
             "sampled valleys differ from the exhaustive sweep on instance " + std::to_string(i));
  }
}

void criterion_ruggedness(Tally& t) {
  const auto instances = small_landscape_instances();
  int good = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const PuboEnergy pubo = pubo_from_cnf(instances[i]);
    const QuboModel model = quadratize(instances[i], 0.5);
    const auto valleys = discard_saddles(enumerate_valleys_exhaustive(pubo, 5));
    ConnectivityConfig cc;
    cc.mode = ConnectMode::threshold;
    cc.p_min = 0.5;
    cc.temperature = 0.05;
    const std::size_t cold = build_qubo_connectivity(valleys, model, cc).size();
    cc.temperature = 10.0;
    const std::size_t hot = build_qubo_connectivity(valleys, model, cc).size();
    if (cold >= valleys.size() && hot <= cold) ++good;
  }
  t.expect(good * 10 >= int(instances.size()) * 9,
           "component ordering held on only " + std::to_string(good) + "/" +
               std::to_string(instances.size()) + " instances");
}

void criterion_solver_ordering(Tally& t) {
  // Candidate pool; keep the first 20 instances that some solver cracks, so
  // every kept instance is certifiably satisfiable. Certification seeds are
  // disjoint from the benchmark's derived run seeds.
  std::vector<BenchInstance> kept;
  for (int i = 0; i < 60 && kept.size() < 20; ++i) {
    CnfFormula f = generate_random_3sat(50, 4.23, mix(606, i));
    const PuboEnergy pubo = pubo_from_cnf(f);
    const QuboModel qmodel = quadratize(f, 1.0);
    bool solvable = false;
    for (int r = 0; r < 24 && !solvable; ++r) {
      PuboSolverConfig pc;
      pc.rule = PuboRule::focus_offset;
      pc.max_steps = kBenchMaxSteps;
      pc.seed = mix(707, i * 64 + r);
      solvable = run_pubo_focus_offset(f, pubo, pc).solved;
    }
    for (int r = 0; r < 6 && !solvable; ++r) {
      QuboSolverConfig qc;
      qc.n_groups = kQuboGroups;
      qc.schedule.t_initial = kQuboTInitial;
      qc.max_steps = kBenchMaxSteps;
      qc.seed = mix(708, i * 64 + r);
      solvable = run_qubo(f, qmodel, qc).solved;
    }
    if (solvable) kept.push_back({"n50_" + std::to_string(i), std::move(f)});
  }
  t.expect(kept.size() == 20,
           "only " + std::to_string(kept.size()) + " of 60 candidates were solvable");
  if (kept.size() < 20) return;

  BenchConfig cfg;
  cfg.master_seed = 1;
  cfg.tts.target = 0.99;
  cfg.tts.n_runs = 100;
  cfg.tts.max_steps = kBenchMaxSteps;
  BenchSolverConfig qubo;
  qubo.id = SolverId::qubo;
  qubo.penalty = 1.0;
  qubo.qubo.n_groups = kQuboGroups;
  qubo.qubo.schedule.t_initial = kQuboTInitial;
  BenchSolverConfig focus;
  focus.id = SolverId::pubo_focus;
  cfg.solvers = {qubo, focus};
  const BenchReport report = run_benchmark(kept, cfg);

  double steps_qubo = -1.0, steps_focus = -1.0;
  for (const SizeSolverMedian& m : report.medians) {
    if (m.size != 50) continue;
    if (m.solver == "qubo") steps_qubo = m.median_tts_steps;
    if (m.solver == "pubo-focus") steps_focus = m.median_tts_steps;
  }
  t.expect(steps_qubo > 0.0 && steps_focus > 0.0, "missing median rows for size 50");
  t.expect(steps_focus < steps_qubo,
           "median TTS-steps: focus-offset " + std::to_string(steps_focus) +
               " not below qubo " + std::to_string(steps_qubo));
}

void criterion_cost_model(Tally& t) {
  const CostModel m;
  const double steps = 5000.0;
  const double ets_ratio =
      ets_joules(steps, m, SolverKind::qubo, 50) / ets_joules(steps, m, SolverKind::pubo, 50);
  t.expect(std::fabs(ets_ratio - 2.45) <= 1e-9, "energy ratio is not 2.45");
  const double tts_ratio =
      tts_seconds(steps, m, SolverKind::qubo, 50) / tts_seconds(steps, m, SolverKind::pubo, 50);
  t.expect(std::fabs(tts_ratio - 1.0 / 1.35) <= 1e-9, "time ratio is not 1/1.35");
  t.expect(tiles_required(150) == 8, "tiles_required(150) != 8");
  t.expect(pubo_wordlines(20) == 190, "pubo_wordlines(20) != 190");
  t.expect(search_space_bits(100, 423, Representation::quadratized) == 523,
           "search_space_bits(100,423,quadratized) != 523");
}

void criterion_tts_estimator(Tally& t) {
  t.expect(tts_steps(0.99, 10000, 0.99) == 10000.0, "p_hat at target must return max_steps");
  t.expect(std::fabs(tts_steps(0.5, 1000, 0.99) - 6643.86) <= 0.01,
           "tts_steps(0.5, 1000) is not 6643.86");
  t.expect(std::isinf(tts_steps(0.0, 1000, 0.99)), "p_hat 0 must be infinite");
}

int run_cli(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism(Tally& t) {
  const char* cli = std::getenv("HOPSAT_CLI");
  if (!cli || !*cli) {
    t.expect(false, "HOPSAT_CLI is not set");
    return;
  }
  const fs::path dir = "acceptance_tmp";
  fs::create_directories(dir);
  const fs::path cnf = dir / "det.cnf";
  {
    std::ofstream out(cnf);
    out << write_dimacs(generate_random_3sat(20, 4.23, 99));
  }
  const std::string q = "\"" + std::string(cli) + "\"";

  const std::string solve_tail = " solve " + cnf.string() +
                                 " --solver qubo --seed 5 --max-steps 2000 --n-groups 8"
                                 " --t-initial 0.8 -o ";
  const int rc1 = run_cli(q + solve_tail + (dir / "s1.json").string());
  const int rc2 = run_cli(q + solve_tail + (dir / "s2.json").string());
  t.expect(rc1 == rc2 && (rc1 == 0 || rc1 == 10), "solve exit codes differ or are unexpected");
  const std::string s1 = slurp(dir / "s1.json");
  t.expect(!s1.empty() && s1 == slurp(dir / "s2.json"), "solve results are not byte-identical");

  const std::string focus_tail = " solve " + cnf.string() +
                                 " --solver pubo-focus --seed 3 --max-steps 5000 -o ";
  const int rc3 = run_cli(q + focus_tail + (dir / "p1.json").string());
  const int rc4 = run_cli(q + focus_tail + (dir / "p2.json").string());
  t.expect(rc3 == rc4 && (rc3 == 0 || rc3 == 10), "focus solve exit codes differ");
  t.expect(slurp(dir / "p1.json") == slurp(dir / "p2.json"),
           "focus solve results are not byte-identical");

  const std::string bench_tail = " bench " + cnf.string() +
                                 " --runs 5 --max-steps 500 --master-seed 4 --out-dir ";
  const int rb1 = run_cli(q + bench_tail + (dir / "b1").string());
  const int rb2 = run_cli(q + bench_tail + (dir / "b2").string());
  t.expect(rb1 == 0 && rb2 == 0, "bench exit codes are nonzero");
  const std::string r1 = slurp(dir / "b1" / "report.json");
  t.expect(!r1.empty() && r1 == slurp(dir / "b2" / "report.json"),
           "bench reports are not byte-identical");
  t.expect(slurp(dir / "b1" / "medians.csv") == slurp(dir / "b2" / "medians.csv"),
           "bench medians are not byte-identical");
}

void criterion_decorrelation(Tally& t) {
  for (int i = 0; i < 5; ++i) {
    const CnfFormula f = generate_random_3sat(20, 4.55, mix(2000, i));
    const QuboModel model = quadratize(f, 1.0);
    QuboSolverConfig cfg;
    cfg.n_groups = 8;
    cfg.schedule.t_initial = 1.0;
    cfg.max_steps = 2000;
    cfg.seed = mix(2100, i);
    const DeltaHistogram h = delta_correlation_histogram(f, model, cfg);

    bool decorrelated = false;
    std::uint64_t sum = 0;
    for (const auto& [key, count] : h.counts) {
      sum += count;
      if (key.first > 0 && key.second <= 0 && count > 0) decorrelated = true;
    }
    t.expect(decorrelated,
             "no energy-lowering, non-clause-gaining flip on instance " + std::to_string(i));
    t.expect(sum == h.total, "histogram does not conserve counts");
    t.expect(h.aux_flips + h.orig_flips == h.total, "flip attribution does not add up");

    const RunResult replay = run_qubo(f, model, cfg);
    t.expect(replay.flips == h.total, "histogram total differs from the run's flip count");
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Tally&)> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "cubic energy equals unsatisfied-clause count", criterion_pubo_faithfulness},
      {2, "auxiliary minimization is exact at unit penalty", criterion_quadratization},
      {3, "factorized transition probability matches enumeration", criterion_transition_probability},
      {4, "sampler reproduces exhaustive low-energy valleys", criterion_sampler},
      {5, "quadratization fragments valleys, temperature reconnects", criterion_ruggedness},
      {6, "focus-offset beats the quadratic solver on median TTS", criterion_solver_ordering},
      {7, "cost-model ratios and geometry", criterion_cost_model},
      {8, "restart-formula estimator edge cases", criterion_tts_estimator},
      {9, "CLI runs are byte-identical", criterion_determinism},
      {10, "energy descent decorrelates from clause progress", criterion_decorrelation},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    Tally tally;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.fn(tally);
    } catch (const std::exception& e) {
      tally.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1fs", secs);
    if (tally.failures.empty()) {
      std::cout << "PASS  criterion " << c.id << "  " << c.name << "  (" << timing << ")\n";
    } else {
      ++failed;
      std::cout << "FAIL  criterion " << c.id << "  " << c.name << "  (" << timing << ")\n";
      for (const std::string& f : tally.failures) std::cout << "      - " << f << "\n";
    }
    std::cout.flush();
  }
  return failed;
}
