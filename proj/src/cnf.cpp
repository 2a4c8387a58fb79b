#include "cnf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "rng.hpp"

namespace hopsat {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

long long parse_int(std::string_view tok, std::size_t line_no) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(line_no, "expected integer, got '" + std::string(tok) + "'");
  return v;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  bool have_header = false;
  long long declared_clauses = 0;
  std::vector<Literal> current;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    std::size_t first = 0;
    while (first < line.size() && is_space(line[first])) ++first;
    if (first == line.size()) {
      if (pos > text.size()) break;
      continue;
    }
    char head = line[first];
    if (head == 'c' || head == 'C') continue;
    if (head == '%') break;  // SATLIB end-of-file marker
    if (head == 'p') {
      if (have_header) throw ParseError(line_no, "duplicate 'p' header");
      auto toks = split_tokens(line);
      if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf")
        throw ParseError(line_no, "malformed header (expected 'p cnf <vars> <clauses>')");
      long long n = parse_int(toks[2], line_no);
      long long m = parse_int(toks[3], line_no);
      if (n < 0 || m < 0) throw ParseError(line_no, "negative counts in header");
      f.n_vars = static_cast<std::uint32_t>(n);
      declared_clauses = m;
      have_header = true;
      continue;
    }

    if (!have_header) throw ParseError(line_no, "clause data before 'p cnf' header");
    for (std::string_view tok : split_tokens(line)) {
      long long lit = parse_int(tok, line_no);
      if (lit == 0) {
        f.clauses.push_back(Clause{current});
        current.clear();
        continue;
      }
      std::uint64_t v = static_cast<std::uint64_t>(lit < 0 ? -lit : lit);
      if (v > f.n_vars)
        throw ParseError(line_no, "literal " + std::string(tok) + " out of range (formula has " +
                                      std::to_string(f.n_vars) + " variables)");
      Literal l{static_cast<std::uint32_t>(v - 1), lit < 0};
      for (const Literal& prev : current)
        if (prev.var == l.var)
          throw ParseError(line_no,
                           "variable " + std::to_string(v) + " repeated within one clause");
      current.push_back(l);
    }

    if (pos > text.size()) break;
  }

  if (!have_header) throw ParseError(line_no, "missing 'p cnf' header");
  if (!current.empty()) throw ParseError(line_no, "unterminated clause (missing trailing 0)");
  if (static_cast<long long>(f.clauses.size()) != declared_clauses)
    throw ParseError(line_no, "clause count mismatch: header declares " +
                                  std::to_string(declared_clauses) + ", found " +
                                  std::to_string(f.clauses.size()));
  return f;
}

std::string write_dimacs(const CnfFormula& f) {
  std::string out = "p cnf " + std::to_string(f.n_vars) + " " + std::to_string(f.clauses.size()) + "\n";
  for (const Clause& c : f.clauses) {
    for (const Literal& l : c.literals) {
      long long v = static_cast<long long>(l.var) + 1;
      out += std::to_string(l.negated ? -v : v);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

bool evaluate(const CnfFormula& f, const Assignment& x) {
  return count_unsat(f, x) == 0;
}

std::uint32_t count_unsat(const CnfFormula& f, const Assignment& x) {
  if (x.size() != f.n_vars)
    throw std::invalid_argument("assignment length " + std::to_string(x.size()) +
                                " does not match formula with " + std::to_string(f.n_vars) +
                                " variables");
  std::uint32_t unsat = 0;
  for (const Clause& c : f.clauses) {
    bool sat = false;
    for (const Literal& l : c.literals)
      if (l.holds(x)) {
        sat = true;
        break;
      }
    if (!sat) ++unsat;
  }
  return unsat;
}

CnfFormula generate_random_3sat(std::uint32_t n_vars, double clause_ratio, std::uint64_t seed,
                                GeneratorOptions opts) {
  if (n_vars < 3) throw std::invalid_argument("generate_random_3sat requires n_vars >= 3");
  if (!(clause_ratio > 0)) throw std::invalid_argument("clause_ratio must be positive");

  const auto n_clauses = static_cast<std::uint64_t>(std::llround(clause_ratio * n_vars));
  CnfFormula f;
  f.n_vars = n_vars;
  f.clauses.reserve(n_clauses);

  Xoshiro256ss rng(seed);
  std::set<std::array<std::uint64_t, 3>> seen;  // canonical keys, distinct_clauses only
  while (f.clauses.size() < n_clauses) {
    std::uint32_t v[3];
    v[0] = static_cast<std::uint32_t>(rng.bounded(n_vars));
    do {
      v[1] = static_cast<std::uint32_t>(rng.bounded(n_vars));
    } while (v[1] == v[0]);
    do {
      v[2] = static_cast<std::uint32_t>(rng.bounded(n_vars));
    } while (v[2] == v[0] || v[2] == v[1]);

    Clause c;
    for (std::uint32_t vi : v) c.literals.push_back({vi, rng.bounded(2) == 0});

    if (opts.distinct_clauses) {
      std::array<std::uint64_t, 3> key;
      for (int i = 0; i < 3; ++i)
        key[i] = (std::uint64_t(c.literals[i].var) << 1) | (c.literals[i].negated ? 1 : 0);
      std::sort(key.begin(), key.end());
      if (!seen.insert(key).second) continue;
    }
    f.clauses.push_back(std::move(c));
  }
  return f;
}

}  // namespace hopsat
