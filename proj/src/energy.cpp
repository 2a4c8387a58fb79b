#include "energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace hopsat {

namespace {

using json = nlohmann::ordered_json;

// Accumulates monomial coefficients keyed by the sorted variable tuple;
// arity 0 goes to the constant.
class PolyBuilder {
 public:
  explicit PolyBuilder(std::uint32_t n_vars) : n_vars_(n_vars) {}

  void add(std::vector<std::uint32_t> vars, double coeff) {
    if (coeff == 0.0) return;
    if (vars.empty()) {
      constant_ += coeff;
      return;
    }
    std::sort(vars.begin(), vars.end());
    Key k{};
    k[3] = vars.size();
    for (std::size_t i = 0; i < vars.size(); ++i) k[i] = vars[i];
    coeffs_[k] += coeff;
  }

  Poly finish() {
    Poly p;
    p.n_vars = n_vars_;
    p.constant = constant_;
    for (const auto& [k, c] : coeffs_) {
      if (c == 0.0) continue;  // exact cancellation of integer coefficients
      Term t;
      t.arity = std::uint8_t(k[3]);
      for (std::uint8_t i = 0; i < t.arity; ++i) t.vars[i] = k[i];
      t.coeff = c;
      p.terms.push_back(t);
    }
    std::sort(p.terms.begin(), p.terms.end(), [](const Term& a, const Term& b) {
      if (a.arity != b.arity) return a.arity < b.arity;
      return a.vars < b.vars;
    });
    p.build_index();
    return p;
  }

 private:
  using Key = std::array<std::uint32_t, 4>;  // vars[0..2], arity
  std::uint32_t n_vars_;
  double constant_ = 0.0;
  std::map<Key, double> coeffs_;
};

// Complement indicator of a literal: the factor that is 1 exactly when the
// literal is false.
VarExpr complement_factor(const Literal& lit) {
  return VarExpr{lit.var, !lit.negated};
}

// Adds coeff * prod_j expr_j expanded into monomials: each (1 - x) factor
// contributes either the constant 1 or -x.
void add_product(PolyBuilder& b, const std::vector<VarExpr>& factors, double coeff) {
  std::size_t k = factors.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
    double c = coeff;
    std::vector<std::uint32_t> vars;
    bool skip = false;
    for (std::size_t j = 0; j < k; ++j) {
      const VarExpr& f = factors[j];
      if (mask & (std::size_t(1) << j)) {
        vars.push_back(f.var);
        if (f.one_minus) c = -c;
      } else if (f.one_minus) {
        // constant part of (1 - x) is 1
      } else {
        skip = true;  // plain x has no constant part
        break;
      }
    }
    if (!skip) b.add(std::move(vars), c);
  }
}

void require_three_distinct(const Clause& cl, std::uint32_t idx) {
  if (cl.literals.size() != 3)
    throw std::invalid_argument("clause " + std::to_string(idx + 1) + " does not have 3 literals");
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (cl.literals[i].var == cl.literals[j].var)
        throw std::invalid_argument("clause " + std::to_string(idx + 1) + " repeats a variable");
}

json terms_of_arity(const Poly& p, std::uint8_t arity) {
  json arr = json::array();
  for (const Term& t : p.terms) {
    if (t.arity != arity) continue;
    json row = json::array();
    for (std::uint8_t i = 0; i < arity; ++i) row.push_back(t.vars[i]);
    row.push_back(t.coeff);
    arr.push_back(std::move(row));
  }
  return arr;
}

void load_terms(PolyBuilder& b, const json& arr, std::uint8_t arity, std::uint32_t n_vars) {
  for (const auto& row : arr) {
    if (!row.is_array() || row.size() != std::size_t(arity) + 1)
      throw std::invalid_argument("malformed term row");
    std::vector<std::uint32_t> vars;
    for (std::uint8_t i = 0; i < arity; ++i) {
      std::int64_t v = row[i].get<std::int64_t>();
      if (v < 0 || std::uint64_t(v) >= n_vars) throw std::invalid_argument("term index out of range");
      vars.push_back(std::uint32_t(v));
    }
    b.add(std::move(vars), row[arity].get<double>());
  }
}

json var_expr_to_json(const VarExpr& e) {
  return json{{"var", e.var}, {"one_minus", e.one_minus}};
}

VarExpr var_expr_from_json(const json& j) {
  return VarExpr{j.at("var").get<std::uint32_t>(), j.at("one_minus").get<bool>()};
}

}  // namespace

void Poly::build_index() {
  var_terms.assign(n_vars, {});
  for (std::uint32_t t = 0; t < terms.size(); ++t)
    for (std::uint8_t i = 0; i < terms[t].arity; ++i)
      var_terms[terms[t].vars[i]].push_back(t);
}

double Poly::eval(const Assignment& s) const {
  if (s.size() != n_vars) throw std::invalid_argument("assignment length mismatch");
  double e = constant;
  for (const Term& t : terms) {
    std::uint8_t prod = 1;
    for (std::uint8_t i = 0; i < t.arity; ++i) prod &= s[t.vars[i]];
    if (prod) e += t.coeff;
  }
  return e;
}

double Poly::flip_delta(const Assignment& s, std::uint32_t var) const {
  // h = sum over terms containing var of coeff * prod of the other bits;
  // flipping var changes the energy by (1 - 2 s_var) * h.
  double h = 0.0;
  for (std::uint32_t ti : var_terms[var]) {
    const Term& t = terms[ti];
    std::uint8_t prod = 1;
    for (std::uint8_t i = 0; i < t.arity; ++i)
      if (t.vars[i] != var) prod &= s[t.vars[i]];
    if (prod) h += t.coeff;
  }
  return (1.0 - 2.0 * s[var]) * h;
}

PuboEnergy pubo_from_cnf(const CnfFormula& f) {
  PolyBuilder b(f.n_vars);
  for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
    const Clause& cl = f.clauses[c];
    require_three_distinct(cl, c);
    std::vector<VarExpr> factors;
    for (const Literal& lit : cl.literals) factors.push_back(complement_factor(lit));
    add_product(b, factors, 1.0);
  }
  PuboEnergy m;
  m.poly = b.finish();
  return m;
}

QuboModel quadratize(const CnfFormula& f, double penalty) {
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty must be positive");
  QuboModel m;
  m.n_orig = f.n_vars;
  m.n_aux = f.n_clauses();
  m.penalty = penalty;

  PolyBuilder b(m.n_total());
  for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
    const Clause& cl = f.clauses[c];
    require_three_distinct(cl, c);
    AuxRecord rec;
    rec.clause = c;
    rec.aux = m.n_orig + c;
    rec.a = complement_factor(cl.literals[0]);
    rec.b = complement_factor(cl.literals[1]);
    rec.third = complement_factor(cl.literals[2]);
    VarExpr y{rec.aux, false};

    // clause energy a*b*third with y substituted for a*b, plus the exactness
    // penalty P*(ab - 2ay - 2by + 3y)
    add_product(b, {y, rec.third}, 1.0);
    add_product(b, {rec.a, rec.b}, penalty);
    add_product(b, {rec.a, y}, -2.0 * penalty);
    add_product(b, {rec.b, y}, -2.0 * penalty);
    add_product(b, {y}, 3.0 * penalty);

    m.aux_map.push_back(rec);
  }
  m.poly = b.finish();
  return m;
}

FlipDelta flip_delta(const Poly& p, const Assignment& s, std::uint32_t var) {
  return FlipDelta{var, p.flip_delta(s, var)};
}

std::pair<double, Assignment> min_over_aux(const QuboModel& m, const Assignment& x) {
  if (x.size() != m.n_orig) throw std::invalid_argument("assignment length mismatch");
  Assignment y(m.n_aux, 0);
  for (const AuxRecord& rec : m.aux_map) {
    // E(x, y) collects, per clause, P*ab + y*(third + P*(3 - 2a - 2b));
    // y = 1 pays off exactly when that coefficient is negative.
    double coeff = rec.third.value(x) +
                   m.penalty * (3.0 - 2.0 * rec.a.value(x) - 2.0 * rec.b.value(x));
    y[rec.clause] = coeff < 0.0 ? 1 : 0;
  }
  Assignment full = x;
  full.insert(full.end(), y.begin(), y.end());
  return {m.poly.eval(full), y};
}

Assignment extend_with_aux(const QuboModel& m, const Assignment& x) {
  if (x.size() != m.n_orig) throw std::invalid_argument("assignment length mismatch");
  Assignment full = x;
  full.resize(m.n_total());
  for (const AuxRecord& rec : m.aux_map)
    full[rec.aux] = std::uint8_t(rec.a.value(x) * rec.b.value(x));
  return full;
}

IncrementalState::IncrementalState(const Poly& p, Assignment bits, std::uint64_t recompute_interval)
    : poly_(&p), bits_(std::move(bits)), interval_(recompute_interval) {
  if (bits_.size() != p.n_vars) throw std::invalid_argument("assignment length mismatch");
  if (p.var_terms.size() != p.n_vars) throw std::logic_error("poly index not built");
  rebuild();
}

void IncrementalState::rebuild() {
  energy_ = poly_->eval(bits_);
  fields_.assign(poly_->n_vars, 0.0);
  for (const Term& t : poly_->terms) {
    for (std::uint8_t i = 0; i < t.arity; ++i) {
      std::uint8_t prod = 1;
      for (std::uint8_t j = 0; j < t.arity; ++j)
        if (j != i) prod &= bits_[t.vars[j]];
      if (prod) fields_[t.vars[i]] += t.coeff;
    }
  }
  since_check_ = 0;
}

void IncrementalState::flip(std::uint32_t var) {
  energy_ += delta(var);
  // sign of the change each neighbouring field sees: var's factor goes
  // 0 -> 1 (add) or 1 -> 0 (subtract)
  double sign = bits_[var] ? -1.0 : 1.0;
  bits_[var] ^= 1;
  for (std::uint32_t ti : poly_->var_terms[var]) {
    const Term& t = poly_->terms[ti];
    if (t.arity == 1) continue;
    for (std::uint8_t i = 0; i < t.arity; ++i) {
      if (t.vars[i] == var) continue;
      std::uint8_t prod = 1;
      for (std::uint8_t j = 0; j < t.arity; ++j)
        if (j != i && t.vars[j] != var) prod &= bits_[t.vars[j]];
      if (prod) fields_[t.vars[i]] += sign * t.coeff;
    }
  }
  if (interval_ > 0 && ++since_check_ >= interval_) {
    double fresh = poly_->eval(bits_);
    if (std::abs(fresh - energy_) > 1e-9)
      throw std::logic_error("incremental energy drifted from full recompute");
    energy_ = fresh;
    since_check_ = 0;
  }
}

std::string pubo_to_json(const PuboEnergy& m) {
  json j;
  j["n_vars"] = m.poly.n_vars;
  j["constant"] = m.poly.constant;
  j["linear"] = terms_of_arity(m.poly, 1);
  j["quadratic"] = terms_of_arity(m.poly, 2);
  j["cubic"] = terms_of_arity(m.poly, 3);
  return j.dump(2) + "\n";
}

std::string qubo_to_json(const QuboModel& m) {
  json j;
  j["n_vars"] = m.n_total();
  j["n_aux"] = m.n_aux;
  j["constant"] = m.poly.constant;
  j["linear"] = terms_of_arity(m.poly, 1);
  j["quadratic"] = terms_of_arity(m.poly, 2);
  j["cubic"] = json::array();
  j["penalty_P"] = m.penalty;
  json aux = json::array();
  for (const AuxRecord& rec : m.aux_map) {
    json r;
    r["clause"] = rec.clause;
    r["aux"] = rec.aux;
    r["a"] = var_expr_to_json(rec.a);
    r["b"] = var_expr_to_json(rec.b);
    r["third"] = var_expr_to_json(rec.third);
    aux.push_back(std::move(r));
  }
  j["aux_map"] = std::move(aux);
  return j.dump(2) + "\n";
}

PuboEnergy pubo_from_json(std::string_view text) {
  json j = json::parse(text);
  std::uint32_t n = j.at("n_vars").get<std::uint32_t>();
  PolyBuilder b(n);
  b.add({}, j.at("constant").get<double>());
  load_terms(b, j.at("linear"), 1, n);
  load_terms(b, j.at("quadratic"), 2, n);
  load_terms(b, j.at("cubic"), 3, n);
  PuboEnergy m;
  m.poly = b.finish();
  return m;
}

QuboModel qubo_from_json(std::string_view text) {
  json j = json::parse(text);
  QuboModel m;
  std::uint32_t n = j.at("n_vars").get<std::uint32_t>();
  m.n_aux = j.at("n_aux").get<std::uint32_t>();
  if (m.n_aux > n) throw std::invalid_argument("n_aux exceeds n_vars");
  m.n_orig = n - m.n_aux;
  m.penalty = j.at("penalty_P").get<double>();
  PolyBuilder b(n);
  b.add({}, j.at("constant").get<double>());
  load_terms(b, j.at("linear"), 1, n);
  load_terms(b, j.at("quadratic"), 2, n);
  if (j.contains("cubic")) load_terms(b, j.at("cubic"), 3, n);
  m.poly = b.finish();
  for (const auto& r : j.at("aux_map")) {
    AuxRecord rec;
    rec.clause = r.at("clause").get<std::uint32_t>();
    rec.aux = r.at("aux").get<std::uint32_t>();
    rec.a = var_expr_from_json(r.at("a"));
    rec.b = var_expr_from_json(r.at("b"));
    rec.third = var_expr_from_json(r.at("third"));
    m.aux_map.push_back(rec);
  }
  return m;
}

}  // namespace hopsat
