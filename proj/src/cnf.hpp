#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hopsat {

// One byte per variable, each 0 or 1. Length always matches the owning
// formula/model; operations throw std::invalid_argument on mismatch.
using Assignment = std::vector<std::uint8_t>;

struct Literal {
  std::uint32_t var = 0;  // 0-based
  bool negated = false;

  bool holds(const Assignment& x) const { return negated ? x[var] == 0 : x[var] != 0; }
  bool operator==(const Literal&) const = default;
};

struct Clause {
  std::vector<Literal> literals;
};

// CNF over variables 0..n_vars-1. Clause duplicates are preserved as read;
// duplicate variables inside one clause are rejected at parse/generation time.
struct CnfFormula {
  std::uint32_t n_vars = 0;
  std::vector<Clause> clauses;

  std::uint32_t n_clauses() const { return static_cast<std::uint32_t>(clauses.size()); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("dimacs parse error, line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// DIMACS CNF reader. Accepts 'c' comments, one 'p cnf <n> <m>' header and
// whitespace-separated signed literals with '0' terminators; clauses may span
// lines. A line starting with '%' ends the input (SATLIB files carry a
// "%\n0" footer). 1-based DIMACS variables map to 0-based indices.
CnfFormula parse_dimacs(std::string_view text);

// Canonical output: header, then one clause per line, '0'-terminated.
std::string write_dimacs(const CnfFormula& f);

bool evaluate(const CnfFormula& f, const Assignment& x);
std::uint32_t count_unsat(const CnfFormula& f, const Assignment& x);

struct GeneratorOptions {
  bool distinct_clauses = false;  // redraw clauses that duplicate an earlier one
};

// Uniform random 3-SAT: round(clause_ratio*n_vars) clauses, three distinct
// variables per clause drawn without replacement, fair-coin polarities.
// Rounding is half-away-from-zero. Identical arguments give identical output.
CnfFormula generate_random_3sat(std::uint32_t n_vars, double clause_ratio, std::uint64_t seed,
                                GeneratorOptions opts = {});

}  // namespace hopsat
