// Shared fixtures and independent reference implementations for the tests.
// The oracles here deliberately use direct enumeration so they stay obviously
// correct; production code must match them, not the other way round.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "cnf.hpp"
#include "energy.hpp"

namespace testutil {

// Two clauses over four variables:
//   (-x0 OR x1 OR x2) AND (x0 OR x2 OR x3)
// Small enough to expand by hand; used for frozen-coefficient checks.
inline hopsat::CnfFormula two_clause_formula() {
  hopsat::CnfFormula f;
  f.n_vars = 4;
  f.clauses.resize(2);
  f.clauses[0].literals = {{0, true}, {1, false}, {2, false}};
  f.clauses[1].literals = {{0, false}, {2, false}, {3, false}};
  return f;
}

inline hopsat::Assignment assignment_from_mask(std::uint64_t mask, std::uint32_t n) {
  hopsat::Assignment x(n);
  for (std::uint32_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1u;
  return x;
}

// Minimum unsatisfied-clause count over all 2^n assignments (n <= 24).
inline std::uint32_t min_unsat_exhaustive(const hopsat::CnfFormula& f) {
  if (f.n_vars > 24) throw std::invalid_argument("formula too large for enumeration");
  std::uint32_t best = f.n_clauses();
  for (std::uint64_t m = 0; m < (1ull << f.n_vars); ++m) {
    const auto x = assignment_from_mask(m, f.n_vars);
    best = std::min(best, hopsat::count_unsat(f, x));
    if (best == 0) break;
  }
  return best;
}

inline bool is_satisfiable(const hopsat::CnfFormula& f) { return min_unsat_exhaustive(f) == 0; }

// Reference inter-configuration transition probability: enumerate every
// auxiliary vector, keep those whose combined quadratic energy at x_a equals
// the native cubic energy of x_a, and average the Boltzmann factor of the
// quadratic energy change when the originals move to x_b. No factorization,
// no shortcuts. T <= 0 counts non-increasing moves.
inline double brute_force_transition(const hopsat::QuboModel& m, const hopsat::Assignment& x_a,
                                     const hopsat::Assignment& x_b, double temperature) {
  if (m.n_aux > 20) throw std::invalid_argument("too many auxiliaries for enumeration");
  // Native energy: sum of per-clause complement products at x_a.
  double native = 0.0;
  for (const auto& rec : m.aux_map)
    native += rec.a.value(x_a) * rec.b.value(x_a) * rec.third.value(x_a);

  hopsat::Assignment sa(m.n_total()), sb(m.n_total());
  for (std::uint32_t i = 0; i < m.n_orig; ++i) {
    sa[i] = x_a[i];
    sb[i] = x_b[i];
  }
  double sum = 0.0;
  std::uint64_t count = 0;
  for (std::uint64_t y = 0; y < (1ull << m.n_aux); ++y) {
    for (std::uint32_t j = 0; j < m.n_aux; ++j) sa[m.n_orig + j] = sb[m.n_orig + j] = (y >> j) & 1u;
    const double ea = m.energy(sa);
    if (ea != native) continue;
    ++count;
    const double de = m.energy(sb) - ea;
    if (temperature > 0.0)
      sum += std::exp(-de / temperature);
    else
      sum += de <= 0.0 ? 1.0 : 0.0;
  }
  if (count == 0) throw std::logic_error("empty reference set");
  return sum / double(count);
}

}  // namespace testutil
