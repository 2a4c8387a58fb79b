#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cnf.hpp"

namespace hopsat {

// One monomial coeff * prod_j s[vars[j]], 1 <= arity <= 3, variables sorted
// and distinct.
struct Term {
  std::array<std::uint32_t, 3> vars{};
  std::uint8_t arity = 0;
  double coeff = 0.0;
};

// Sparse multilinear polynomial over {0,1}^n_vars with a per-variable index
// of the terms touching each variable. Coefficients from CNF compilation are
// integers (or integer multiples of the penalty), so double arithmetic on
// them is exact.
struct Poly {
  std::uint32_t n_vars = 0;
  double constant = 0.0;
  std::vector<Term> terms;
  std::vector<std::vector<std::uint32_t>> var_terms;

  void build_index();
  double eval(const Assignment& s) const;
  // Exact E(s with bit var flipped) - E(s), in time proportional to the
  // number of terms containing var.
  double flip_delta(const Assignment& s, std::uint32_t var) const;
};

struct FlipDelta {
  std::uint32_t var = 0;
  double delta_e = 0.0;
};

// Degree-<=3 energy compiled from a 3-SAT formula. E(x) equals the number of
// unsatisfied clauses for every assignment.
struct PuboEnergy {
  Poly poly;

  std::uint32_t n_vars() const { return poly.n_vars; }
  double energy(const Assignment& x) const { return poly.eval(x); }
};

// x_var or (1 - x_var); the complement indicator of one clause literal.
struct VarExpr {
  std::uint32_t var = 0;
  bool one_minus = false;

  double value(const Assignment& x) const { return one_minus ? 1.0 - x[var] : double(x[var]); }
  int value_bit(std::uint64_t mask) const {
    int b = int((mask >> var) & 1);
    return one_minus ? 1 - b : b;
  }
};

// Records y_c = a*b for one clause; aux index lives in the combined variable
// space (originals 0..n_orig-1, then one auxiliary per clause).
struct AuxRecord {
  std::uint32_t clause = 0;
  std::uint32_t aux = 0;
  VarExpr a, b;      // substituted pair, in clause order
  VarExpr third;     // remaining cubic factor
};

// Rosenberg-quadratized model over n_orig + n_aux binary variables. Every
// auxiliary couples only to the original variables of its own clause.
struct QuboModel {
  std::uint32_t n_orig = 0;
  std::uint32_t n_aux = 0;
  double penalty = 1.0;
  Poly poly;  // degree <= 2, over the combined variable space
  std::vector<AuxRecord> aux_map;

  std::uint32_t n_total() const { return n_orig + n_aux; }
  double energy(const Assignment& s) const { return poly.eval(s); }
};

// Expands each clause's product of literal complements into monomials and
// accumulates them; requires every clause to have exactly 3 distinct
// variables.
PuboEnergy pubo_from_cnf(const CnfFormula& f);

// Substitutes y = a*b for the first two complement factors of each clause and
// adds the penalty P*(ab - 2ay - 2by + 3y), fully expanded. Requires P > 0.
QuboModel quadratize(const CnfFormula& f, double penalty);

FlipDelta flip_delta(const Poly& p, const Assignment& s, std::uint32_t var);

// Exact min over auxiliaries of E(x, y) for fixed originals, factorized
// clause by clause; ties prefer y = 0. Returns the minimum and one
// minimizing auxiliary assignment.
std::pair<double, Assignment> min_over_aux(const QuboModel& m, const Assignment& x);

// Combined assignment with auxiliaries set to their constraint-consistent
// values y_c = a*b under x.
Assignment extend_with_aux(const QuboModel& m, const Assignment& x);

// Incremental single-flip evaluation: caches per-variable local fields so a
// flip's energy change is O(1) to query and O(terms containing the variable)
// to apply. Recomputes the full energy every recompute_interval flips and
// verifies agreement within 1e-9.
class IncrementalState {
 public:
  IncrementalState(const Poly& p, Assignment bits, std::uint64_t recompute_interval = 10000);

  double energy() const { return energy_; }
  double delta(std::uint32_t var) const {
    return (1.0 - 2.0 * bits_[var]) * fields_[var];
  }
  void flip(std::uint32_t var);
  const Assignment& bits() const { return bits_; }

 private:
  void rebuild();

  const Poly* poly_;
  Assignment bits_;
  std::vector<double> fields_;
  double energy_ = 0.0;
  std::uint64_t interval_;
  std::uint64_t since_check_ = 0;
};

// JSON schemas are documented in the README; key order is deterministic and
// indices ascend.
std::string pubo_to_json(const PuboEnergy& m);
std::string qubo_to_json(const QuboModel& m);
PuboEnergy pubo_from_json(std::string_view text);
QuboModel qubo_from_json(std::string_view text);

}  // namespace hopsat
