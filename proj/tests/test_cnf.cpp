#include <set>
#include <string>

#include "cnf.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace hopsat;

TEST_CASE("dimacs parsing handles comments, multi-line clauses and the % footer") {
  const std::string text =
      "c sample instance\n"
      "p cnf 4 2\n"
      "-1 2\n"
      "3 0\n"
      "1 3 4 0\n"
      "%\n"
      "0\n";
  const CnfFormula f = parse_dimacs(text);
  CHECK(f.n_vars == 4);
  REQUIRE(f.n_clauses() == 2);
  CHECK(f.clauses[0].literals == std::vector<Literal>{{0, true}, {1, false}, {2, false}});
  CHECK(f.clauses[1].literals == std::vector<Literal>{{0, false}, {2, false}, {3, false}});
}

TEST_CASE("dimacs writer round-trips through the parser") {
  const CnfFormula f = testutil::two_clause_formula();
  const std::string text = write_dimacs(f);
  CHECK(text == "p cnf 4 2\n-1 2 3 0\n1 3 4 0\n");
  const CnfFormula g = parse_dimacs(text);
  CHECK(g.n_vars == f.n_vars);
  REQUIRE(g.n_clauses() == f.n_clauses());
  for (std::size_t i = 0; i < f.clauses.size(); ++i)
    CHECK(g.clauses[i].literals == f.clauses[i].literals);
}

TEST_CASE("dimacs parser rejects malformed input") {
  CHECK_THROWS_AS(parse_dimacs("1 2 3 0\n"), ParseError);                    // data before header
  CHECK_THROWS_AS(parse_dimacs("p cnf 3\n"), ParseError);                    // short header
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\np cnf 3 1\n1 2 3 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 4 0\n"), ParseError);         // var out of range
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 -1 2 0\n"), ParseError);        // repeated variable
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 2\n1 2 3 0\n"), ParseError);         // count mismatch
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 3\n"), ParseError);           // missing terminator
  CHECK_THROWS_AS(parse_dimacs("p cnf 3 1\n1 2 x 0\n"), ParseError);         // non-integer token
  CHECK_THROWS_AS(parse_dimacs("c only a comment\n"), ParseError);           // no header at all

  try {
    parse_dimacs("p cnf 3 1\n1 2 4 0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("evaluate and count_unsat agree with direct clause inspection") {
  const CnfFormula f = testutil::two_clause_formula();
  // (-x0 | x1 | x2) & (x0 | x2 | x3)
  CHECK(count_unsat(f, {0, 0, 0, 0}) == 1);  // second clause fails
  CHECK(count_unsat(f, {1, 0, 0, 0}) == 1);  // first clause fails
  CHECK(count_unsat(f, {1, 1, 0, 1}) == 0);
  CHECK(evaluate(f, {1, 1, 0, 1}));
  CHECK_FALSE(evaluate(f, {0, 0, 0, 0}));
  CHECK_THROWS_AS((void)count_unsat(f, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("random 3-SAT generation: size, arity, determinism") {
  const CnfFormula f = generate_random_3sat(50, 4.23, 99);
  CHECK(f.n_vars == 50);
  CHECK(f.n_clauses() == 212);  // round(4.23 * 50)
  for (const Clause& c : f.clauses) {
    REQUIRE(c.literals.size() == 3);
    std::set<std::uint32_t> vars;
    for (const Literal& l : c.literals) {
      CHECK(l.var < 50);
      vars.insert(l.var);
    }
    CHECK(vars.size() == 3);  // three distinct variables
  }

  const CnfFormula again = generate_random_3sat(50, 4.23, 99);
  CHECK(write_dimacs(again) == write_dimacs(f));
  const CnfFormula other = generate_random_3sat(50, 4.23, 100);
  CHECK(write_dimacs(other) != write_dimacs(f));
}

TEST_CASE("random 3-SAT generation: clause-count rounding and ratios") {
  CHECK(generate_random_3sat(100, 4.23, 1).n_clauses() == 423);
  CHECK(generate_random_3sat(50, 4.36, 1).n_clauses() == 218);
  CHECK(generate_random_3sat(20, 4.55, 1).n_clauses() == 91);
  CHECK(generate_random_3sat(12, 4.23, 1).n_clauses() == 51);
  CHECK_THROWS_AS(generate_random_3sat(2, 4.23, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_random_3sat(10, 0.0, 1), std::invalid_argument);
}

TEST_CASE("distinct-clause generation never repeats a clause up to literal order") {
  const CnfFormula f = generate_random_3sat(10, 8.0, 5, {true});
  std::set<std::set<std::pair<std::uint32_t, bool>>> seen;
  for (const Clause& c : f.clauses) {
    std::set<std::pair<std::uint32_t, bool>> key;
    for (const Literal& l : c.literals) key.insert({l.var, l.negated});
    CHECK(seen.insert(key).second);
  }
  CHECK(f.n_clauses() == 80);
}
