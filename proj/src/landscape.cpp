#include "landscape.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "json.hpp"
#include "rng.hpp"

namespace hopsat {

namespace {

using json = nlohmann::ordered_json;

std::string fmt_num(double v) { return json(v).dump(); }

std::string mask_bitstring(std::uint64_t mask, std::uint32_t n) {
  std::string s(n, '0');
  for (std::uint32_t i = 0; i < n; ++i)
    if (mask & (1ull << i)) s[i] = '1';
  return s;
}

void sort_valleys(std::vector<Valley>& vs) {
  std::sort(vs.begin(), vs.end(), [](const Valley& a, const Valley& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    std::uint64_t fa = a.configs.empty() ? 0 : a.configs.front();
    std::uint64_t fb = b.configs.empty() ? 0 : b.configs.front();
    return fa < fb;
  });
}

// BFS over zero-delta flips from one configuration; stops growing at cap.
Valley expand_valley(const PuboEnergy& model, std::uint64_t seed_mask, std::uint64_t cap) {
  const std::uint32_t n = model.n_vars();
  Valley v;
  v.energy = model.poly.eval(assignment_of(seed_mask, n));
  v.is_local_min = true;
  std::unordered_set<std::uint64_t> seen{seed_mask};
  std::vector<std::uint64_t> stack{seed_mask};
  while (!stack.empty()) {
    std::uint64_t m = stack.back();
    stack.pop_back();
    v.configs.push_back(m);
    Assignment x = assignment_of(m, n);
    for (std::uint32_t b = 0; b < n; ++b) {
      double d = model.poly.flip_delta(x, b);
      if (d < 0.0) {
        v.is_local_min = false;
      } else if (d == 0.0) {
        std::uint64_t nb = m ^ (1ull << b);
        if (seen.count(nb)) continue;
        if (seen.size() >= cap) {
          v.truncated = true;
        } else {
          seen.insert(nb);
          stack.push_back(nb);
        }
      }
    }
  }
  std::sort(v.configs.begin(), v.configs.end());
  return v;
}

// Mean energy under uniform random assignments: every variable contributes a
// factor 1/2 per multilinear term.
double mean_random_energy(const Poly& p) {
  double m = p.constant;
  for (const Term& t : p.terms) m += t.coeff / double(1u << t.arity);
  return m;
}

const char* mode_name(ConnectMode m) {
  return m == ConnectMode::threshold ? "threshold" : "bernoulli";
}

struct Dsu {
  std::vector<std::uint32_t> parent;
  explicit Dsu(std::uint32_t n) : parent(n) {
    for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

json stats_to_json(const LandscapeStats& st) {
  json rows = json::array();
  for (const StatsBin& b : st.bins)
    rows.push_back(json{{"s_bin", b.s_lo}, {"sigma", b.sigma}, {"n_valleys", b.n_valleys}});
  return rows;
}

json valleys_to_json(const std::vector<Valley>& vs, std::uint32_t n) {
  json arr = json::array();
  for (const Valley& v : vs) {
    json configs = json::array();
    for (std::uint64_t m : v.configs) configs.push_back(mask_bitstring(m, n));
    arr.push_back(json{{"energy", v.energy},
                       {"is_local_min", v.is_local_min},
                       {"truncated", v.truncated},
                       {"configs", std::move(configs)}});
  }
  return arr;
}

void append_stat_rows(std::string& out, const std::string& instance, double t, double penalty,
                      const std::string& mode, const LandscapeStats& st) {
  for (const StatsBin& b : st.bins) {
    out += instance;
    out += ',';
    out += fmt_num(t);
    out += ',';
    out += fmt_num(penalty);
    out += ',';
    out += mode;
    out += ',';
    out += fmt_num(b.s_lo);
    out += ',';
    out += fmt_num(b.sigma);
    out += ',';
    out += std::to_string(b.n_valleys);
    out += '\n';
  }
}

}  // namespace

std::uint64_t mask_of(const Assignment& x) {
  if (x.size() > 64) throw std::invalid_argument("mask form limited to 64 variables");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) m |= 1ull << i;
  return m;
}

Assignment assignment_of(std::uint64_t mask, std::uint32_t n_vars) {
  Assignment x(n_vars);
  for (std::uint32_t i = 0; i < n_vars; ++i) x[i] = (mask >> i) & 1;
  return x;
}

std::vector<Valley> enumerate_valleys_exhaustive(const PuboEnergy& model, std::uint32_t k_lowest) {
  const std::uint32_t n = model.n_vars();
  if (n == 0 || n > 24) throw std::invalid_argument("exhaustive sweep limited to 1..24 variables");
  if (k_lowest == 0) return {};
  const std::uint64_t n_conf = 1ull << n;

  // gray-code sweep: one flip per visited configuration
  std::vector<std::uint16_t> energy(n_conf);
  Assignment x(n, 0);
  double e = model.poly.eval(x);
  energy[0] = std::uint16_t(std::llround(e));
  std::uint64_t gray = 0;
  for (std::uint64_t i = 1; i < n_conf; ++i) {
    const std::uint32_t b = std::uint32_t(std::countr_zero(i));
    e += model.poly.flip_delta(x, b);
    x[b] ^= 1;
    gray ^= 1ull << b;
    energy[gray] = std::uint16_t(std::llround(e));
  }

  std::vector<std::uint16_t> levels(energy.begin(), energy.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() > k_lowest) levels.resize(k_lowest);
  const std::uint16_t cut = levels.back();

  std::vector<bool> visited(n_conf, false);
  std::vector<Valley> out;
  std::vector<std::uint64_t> stack;
  for (std::uint64_t m0 = 0; m0 < n_conf; ++m0) {
    if (visited[m0] || energy[m0] > cut) continue;
    Valley v;
    v.energy = energy[m0];
    v.is_local_min = true;
    visited[m0] = true;
    stack.assign(1, m0);
    while (!stack.empty()) {
      const std::uint64_t m = stack.back();
      stack.pop_back();
      v.configs.push_back(m);
      for (std::uint32_t b = 0; b < n; ++b) {
        const std::uint64_t nb = m ^ (1ull << b);
        if (energy[nb] == energy[m0]) {
          if (!visited[nb]) {
            visited[nb] = true;
            stack.push_back(nb);
          }
        } else if (energy[nb] < energy[m0]) {
          v.is_local_min = false;
        }
      }
    }
    std::sort(v.configs.begin(), v.configs.end());
    out.push_back(std::move(v));
  }
  sort_valleys(out);
  return out;
}

std::vector<Valley> discard_saddles(const std::vector<Valley>& valleys) {
  std::vector<Valley> out;
  for (const Valley& v : valleys)
    if (v.is_local_min) out.push_back(v);
  return out;
}

GwlResult gwl_sample_valleys(const PuboEnergy& model, const GwlConfig& cfg) {
  const std::uint32_t n = model.n_vars();
  if (n == 0 || n > 64) throw std::invalid_argument("sampler limited to 1..64 variables");

  Xoshiro256ss init_rng = Xoshiro256ss::substream(cfg.seed, kStreamInit);
  Xoshiro256ss prop_rng = Xoshiro256ss::substream(cfg.seed, kStreamPartition);
  Xoshiro256ss acc_rng = Xoshiro256ss::substream(cfg.seed, kStreamNoise);

  Assignment x(n);
  for (auto& b : x) b = std::uint8_t(init_rng.bounded(2));
  double e = model.poly.eval(x);

  std::int64_t e_cap = std::int64_t(std::ceil(mean_random_energy(model.poly) + cfg.window_margin));
  // greedy descent into the window (with luck the random start is inside)
  bool improved = true;
  while (e > double(e_cap) && improved) {
    improved = false;
    for (std::uint32_t b = 0; b < n && e > double(e_cap); ++b) {
      double d = model.poly.flip_delta(x, b);
      if (d < 0.0) {
        x[b] ^= 1;
        e += d;
        improved = true;
      }
    }
  }
  if (e > double(e_cap)) e_cap = std::int64_t(std::llround(e));

  std::vector<double> lng(std::size_t(e_cap) + 1, 0.0);
  std::vector<std::uint64_t> hist(lng.size(), 0);
  std::vector<std::uint8_t> reachable(lng.size(), 0);
  std::int64_t cur = std::llround(e);
  reachable[cur] = 1;

  auto walk_step = [&](bool learning, double lnf) {
    const std::uint32_t b = std::uint32_t(prop_rng.bounded(n));
    const double d = model.poly.flip_delta(x, b);
    const std::int64_t ne = cur + std::llround(d);
    const double u = acc_rng.u01();
    if (ne >= 0 && ne <= e_cap && u < std::exp(lng[cur] - lng[ne])) {
      x[b] ^= 1;
      cur = ne;
    }
    if (learning) {
      lng[cur] += lnf;
      ++hist[cur];
      reachable[cur] = 1;
    }
  };

  // density-of-states stage: flat-histogram iteration over the energy window
  GwlResult res;
  double lnf = cfg.lnf_initial;
  std::uint64_t steps = 0;
  while (lnf >= cfg.lnf_final && steps < cfg.max_flat_steps) {
    for (std::uint64_t k = 0; k < cfg.flatness_check_interval && steps < cfg.max_flat_steps; ++k) {
      walk_step(true, lnf);
      ++steps;
    }
    std::uint64_t lo = UINT64_MAX, total = 0, nbins = 0;
    bool covered = true;
    for (std::size_t i = 0; i < hist.size(); ++i) {
      if (!reachable[i]) continue;
      if (hist[i] == 0) covered = false;
      lo = std::min(lo, hist[i]);
      total += hist[i];
      ++nbins;
    }
    if (covered && nbins > 0 && double(lo) >= cfg.flatness * (double(total) / double(nbins))) {
      lnf *= 0.5;
      std::fill(hist.begin(), hist.end(), 0);
    }
  }
  res.flat_steps = steps;
  res.final_lnf = lnf;

  // production stage: frozen estimate, collect configurations at the lowest
  // known levels and expand their plateaus
  std::uint64_t budget = cfg.production_steps
                             ? cfg.production_steps
                             : std::max<std::uint64_t>(1'000'000, 64ull << std::min(n, 20u));
  std::vector<std::int64_t> known;
  for (std::size_t i = 0; i < reachable.size(); ++i)
    if (reachable[i]) known.push_back(std::int64_t(i));
  auto level_cut = [&]() {
    const std::size_t k = std::min<std::size_t>(cfg.max_levels, known.size());
    return k == 0 ? std::int64_t(-1) : known[k - 1];
  };
  std::int64_t cut = level_cut();

  std::unordered_set<std::uint64_t> assigned;
  std::uint32_t local_mins = 0;
  for (std::uint64_t step = 0; step < budget; ++step) {
    if (cur <= cut) {
      const std::uint64_t m = mask_of(x);
      if (!assigned.count(m)) {
        Valley v = expand_valley(model, m, cfg.valley_size_cap);
        assigned.insert(v.configs.begin(), v.configs.end());
        if (v.is_local_min) ++local_mins;
        res.valleys.push_back(std::move(v));
        if (local_mins >= cfg.n_valleys) break;
      }
    }
    walk_step(false, 0.0);
    ++res.production_steps;
    if (std::size_t(cur) < reachable.size() && !reachable[cur]) {
      reachable[cur] = 1;
      known.insert(std::upper_bound(known.begin(), known.end(), cur), cur);
      cut = level_cut();
    }
  }

  // keep only the lowest max_levels energy levels among what was found
  std::vector<double> found;
  for (const Valley& v : res.valleys) found.push_back(v.energy);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  if (found.size() > cfg.max_levels) found.resize(cfg.max_levels);
  if (!found.empty()) {
    const double keep_cut = found.back();
    std::erase_if(res.valleys, [&](const Valley& v) { return v.energy > keep_cut; });
  }
  sort_valleys(res.valleys);
  std::uint32_t final_mins = 0;
  for (const Valley& v : res.valleys)
    if (v.is_local_min) ++final_mins;
  res.complete = final_mins >= cfg.n_valleys;
  return res;
}

TransitionEstimate qubo_transition_prob(const QuboModel& model, const Assignment& x_a,
                                        const Assignment& x_b, double temperature) {
  if (x_a.size() != model.n_orig || x_b.size() != model.n_orig)
    throw std::invalid_argument("assignment length mismatch");
  std::uint32_t diff = 0, flipped = 0;
  for (std::uint32_t i = 0; i < model.n_orig; ++i)
    if (x_a[i] != x_b[i]) {
      ++diff;
      flipped = i;
    }
  if (diff != 1) throw std::invalid_argument("endpoints must differ in exactly one bit");

  const double P = model.penalty;
  double e_a = 0.0, e_b = 0.0;
  for (const AuxRecord& rec : model.aux_map) {
    e_a += rec.a.value(x_a) * rec.b.value(x_a) * rec.third.value(x_a);
    e_b += rec.a.value(x_b) * rec.b.value(x_b) * rec.third.value(x_b);
  }
  if (e_a != e_b)
    throw std::invalid_argument("endpoints must sit at equal native energy");

  TransitionEstimate est;
  est.from = x_a;
  est.to = x_b;
  est.n_y = 1;
  est.p_raw = 1.0;
  for (const AuxRecord& rec : model.aux_map) {
    const double aa = rec.a.value(x_a), ba = rec.b.value(x_a), ta = rec.third.value(x_a);
    // clause contribution g(y): y=0 -> P*a*b, y=1 adds third + P*(3-2a-2b)
    const double g0a = P * aa * ba;
    const double g1a = g0a + ta + P * (3.0 - 2.0 * aa - 2.0 * ba);
    const double u = aa * ba * ta;
    const bool in0 = g0a == u, in1 = g1a == u;
    est.n_y *= std::uint64_t(in0) + std::uint64_t(in1);

    const bool touches = rec.a.var == flipped || rec.b.var == flipped || rec.third.var == flipped;
    if (!touches) continue;  // identical clause energies on both sides: factor 1
    const double ab = rec.a.value(x_b), bb = rec.b.value(x_b), tb = rec.third.value(x_b);
    const double g0b = P * ab * bb;
    const double g1b = g0b + tb + P * (3.0 - 2.0 * ab - 2.0 * bb);
    auto weight = [&](double delta) {
      if (temperature > 0.0) return std::exp(-delta / temperature);
      return delta <= 0.0 ? 1.0 : 0.0;  // zero-temperature limit
    };
    double sum = 0.0;
    std::uint32_t cnt = 0;
    if (in0) {
      sum += weight(g0b - g0a);
      ++cnt;
    }
    if (in1) {
      sum += weight(g1b - g1a);
      ++cnt;
    }
    est.p_raw *= sum / double(cnt);
  }
  est.p = std::clamp(est.p_raw, 0.0, 1.0);
  return est;
}

std::vector<Valley> build_qubo_connectivity(const std::vector<Valley>& valleys,
                                            const QuboModel& model,
                                            const ConnectivityConfig& cfg) {
  const std::uint32_t n = model.n_orig;
  Xoshiro256ss edge_rng = Xoshiro256ss::substream(cfg.seed, kStreamNoise);
  std::vector<Valley> out;
  for (const Valley& valley : valleys) {
    std::unordered_map<std::uint64_t, std::uint32_t> index;
    index.reserve(valley.configs.size());
    for (std::uint32_t i = 0; i < valley.configs.size(); ++i) index[valley.configs[i]] = i;
    Dsu dsu(std::uint32_t(valley.configs.size()));
    for (std::uint32_t i = 0; i < valley.configs.size(); ++i) {
      const std::uint64_t m = valley.configs[i];
      const Assignment xa = assignment_of(m, n);
      for (std::uint32_t b = 0; b < n; ++b) {
        const std::uint64_t nb = m ^ (1ull << b);
        if (nb < m) continue;  // handle each unordered pair once
        auto it = index.find(nb);
        if (it == index.end()) continue;
        const Assignment xb = assignment_of(nb, n);
        // a barrier passable in either direction keeps the pair connected
        const double p = std::max(qubo_transition_prob(model, xa, xb, cfg.temperature).p,
                                  qubo_transition_prob(model, xb, xa, cfg.temperature).p);
        const bool keep = cfg.mode == ConnectMode::threshold ? p >= cfg.p_min
                                                             : edge_rng.u01() < p;
        if (keep) dsu.unite(i, it->second);
      }
    }
    std::map<std::uint32_t, Valley> comps;
    for (std::uint32_t i = 0; i < valley.configs.size(); ++i) {
      Valley& c = comps[dsu.find(i)];
      c.energy = valley.energy;
      c.is_local_min = valley.is_local_min;
      c.truncated = valley.truncated;
      c.configs.push_back(valley.configs[i]);
    }
    for (auto& [root, c] : comps) {
      std::sort(c.configs.begin(), c.configs.end());
      out.push_back(std::move(c));
    }
  }
  sort_valleys(out);
  return out;
}

LandscapeStats valley_entropy_complexity(const std::vector<Valley>& components,
                                         std::uint32_t n_vars, double bin_width) {
  if (components.empty()) throw std::invalid_argument("no components to bin");
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin width must be positive");
  LandscapeStats st;
  st.n_vars = n_vars;
  st.bin_width = bin_width;
  st.total_valleys = components.size();
  std::map<std::int64_t, std::uint64_t> counts;
  for (const Valley& v : components) {
    const double s = std::log(double(v.configs.size())) / double(n_vars);
    ++counts[std::int64_t(std::floor(s / bin_width))];
  }
  for (const auto& [bin, count] : counts)
    st.bins.push_back(StatsBin{double(bin) * bin_width,
                               std::log(double(count)) / double(n_vars), count});
  return st;
}

LandscapeStats aggregate_stats(const std::vector<LandscapeStats>& per_instance) {
  LandscapeStats agg;
  if (per_instance.empty()) return agg;
  agg.bin_width = per_instance.front().bin_width;
  struct Acc {
    double sigma_sum = 0.0;
    std::uint64_t instances = 0;
    std::uint64_t valleys = 0;
  };
  std::map<std::int64_t, Acc> acc;
  for (const LandscapeStats& st : per_instance) {
    agg.total_valleys += st.total_valleys;
    for (const StatsBin& b : st.bins) {
      Acc& a = acc[std::llround(b.s_lo / agg.bin_width)];
      a.sigma_sum += b.sigma;
      a.instances += 1;
      a.valleys += b.n_valleys;
    }
  }
  for (const auto& [bin, a] : acc)
    agg.bins.push_back(StatsBin{double(bin) * agg.bin_width,
                                a.sigma_sum / double(a.instances), a.valleys});
  return agg;
}

InstanceLandscape analyze_instance(const CnfFormula& f, std::string name,
                                   const LandscapeJobConfig& cfg) {
  const PuboEnergy pubo = pubo_from_cnf(f);
  const QuboModel qubo = quadratize(f, cfg.penalty);

  InstanceLandscape out;
  out.instance = std::move(name);
  out.n_vars = f.n_vars;

  std::vector<Valley> all;
  if (f.n_vars <= cfg.exhaustive_limit && !cfg.force_gwl) {
    out.method = "exhaustive";
    all = enumerate_valleys_exhaustive(pubo, cfg.max_levels);
  } else {
    out.method = "gwl";
    GwlConfig g = cfg.gwl;
    g.seed = derive_seed(cfg.seed, {fnv1a64(out.instance)});
    g.max_levels = cfg.max_levels;
    g.n_valleys = cfg.n_valleys;
    GwlResult res = gwl_sample_valleys(pubo, g);
    all = std::move(res.valleys);
    out.gwl_complete = res.complete;
  }
  out.pubo_valleys = discard_saddles(all);
  if (!out.pubo_valleys.empty())
    out.pubo_stats = valley_entropy_complexity(out.pubo_valleys, f.n_vars, cfg.bin_width);

  for (double t : cfg.temperatures) {
    ConnectivityConfig cc;
    cc.mode = cfg.mode;
    cc.p_min = cfg.p_min;
    cc.temperature = t;
    cc.seed = derive_seed(cfg.seed, {fnv1a64(out.instance), std::bit_cast<std::uint64_t>(t)});
    InstanceLandscape::PerTemperature pt;
    pt.temperature = t;
    pt.components = build_qubo_connectivity(out.pubo_valleys, qubo, cc);
    if (!pt.components.empty())
      pt.stats = valley_entropy_complexity(pt.components, f.n_vars, cfg.bin_width);
    out.per_t.push_back(std::move(pt));
  }
  return out;
}

std::string landscape_csv(const std::vector<InstanceLandscape>& results,
                          const LandscapeJobConfig& cfg) {
  std::string out = "instance,T,P,mode,s_bin,sigma,n_valleys\n";
  const std::string mode = mode_name(cfg.mode);
  for (const InstanceLandscape& r : results) {
    append_stat_rows(out, r.instance, 0.0, cfg.penalty, "pubo", r.pubo_stats);
    for (const auto& pt : r.per_t)
      append_stat_rows(out, r.instance, pt.temperature, cfg.penalty, mode, pt.stats);
  }
  std::vector<LandscapeStats> pubo_all;
  for (const InstanceLandscape& r : results) pubo_all.push_back(r.pubo_stats);
  append_stat_rows(out, "aggregate", 0.0, cfg.penalty, "pubo", aggregate_stats(pubo_all));
  for (std::size_t ti = 0; ti < cfg.temperatures.size(); ++ti) {
    std::vector<LandscapeStats> at_t;
    for (const InstanceLandscape& r : results)
      if (ti < r.per_t.size()) at_t.push_back(r.per_t[ti].stats);
    append_stat_rows(out, "aggregate", cfg.temperatures[ti], cfg.penalty, mode,
                     aggregate_stats(at_t));
  }
  return out;
}

std::string landscape_json(const std::vector<InstanceLandscape>& results,
                           const LandscapeJobConfig& cfg, bool dump_valleys) {
  json j;
  j["penalty_P"] = cfg.penalty;
  j["mode"] = mode_name(cfg.mode);
  j["p_min"] = cfg.p_min;
  j["temperatures"] = cfg.temperatures;
  j["max_levels"] = cfg.max_levels;
  j["bin_width"] = cfg.bin_width;
  j["seed"] = cfg.seed;

  json arr = json::array();
  std::vector<LandscapeStats> pubo_all;
  for (const InstanceLandscape& r : results) {
    json ji;
    ji["instance"] = r.instance;
    ji["n_vars"] = r.n_vars;
    ji["method"] = r.method;
    ji["gwl_complete"] = r.gwl_complete;
    json jp;
    jp["n_valleys"] = r.pubo_valleys.size();
    jp["stats"] = stats_to_json(r.pubo_stats);
    if (dump_valleys) jp["valleys"] = valleys_to_json(r.pubo_valleys, r.n_vars);
    ji["pubo"] = std::move(jp);
    json jq = json::array();
    for (const auto& pt : r.per_t) {
      json jt;
      jt["T"] = pt.temperature;
      jt["n_components"] = pt.components.size();
      jt["stats"] = stats_to_json(pt.stats);
      if (dump_valleys) jt["components"] = valleys_to_json(pt.components, r.n_vars);
      jq.push_back(std::move(jt));
    }
    ji["qubo"] = std::move(jq);
    arr.push_back(std::move(ji));
    pubo_all.push_back(r.pubo_stats);
  }
  j["instances"] = std::move(arr);

  json jagg;
  jagg["pubo"] = stats_to_json(aggregate_stats(pubo_all));
  json jaggq = json::array();
  for (std::size_t ti = 0; ti < cfg.temperatures.size(); ++ti) {
    std::vector<LandscapeStats> at_t;
    for (const InstanceLandscape& r : results)
      if (ti < r.per_t.size()) at_t.push_back(r.per_t[ti].stats);
    jaggq.push_back(json{{"T", cfg.temperatures[ti]}, {"stats", stats_to_json(aggregate_stats(at_t))}});
  }
  jagg["qubo"] = std::move(jaggq);
  j["aggregate"] = std::move(jagg);
  return j.dump(2) + "\n";
}

}  // namespace hopsat
