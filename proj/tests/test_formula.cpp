#include <random>

#include "doctest.h"
#include "forcinglab/formula.hpp"

using namespace forcinglab;

TEST_CASE("parse examples") {
  Formula f = parse_formula("x in y");
  CHECK(f->op == Op::Member);
  CHECK(f->lhs == Term::variable("x"));
  CHECK(f->rhs == Term::variable("y"));

  Formula g = parse_formula("exists z (z in x & z in y)");
  REQUIRE(g->op == Op::Exists);
  CHECK(g->var == "z");
  CHECK(g->a->op == Op::And);
  CHECK(free_variables(g) == std::set<std::string>{"x", "y"});

  try {
    parse_formula("x in");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 4);
  }
}

TEST_CASE("precedence and printing") {
  CHECK(to_string(parse_formula("!x in y & y = x | x in x -> y in y -> x = y")) ==
        "(((!x in y & y = x) | x in x) -> (y in y -> x = y))");
  CHECK(to_string(parse_formula("forall z (z in x)")) == "!exists z (!z in x)");
  CHECK(to_string(parse_formula("$0 in $12")) == "$0 in $12");
  CHECK_THROWS_AS(parse_formula("x in y)"), ParseError);
  CHECK_THROWS_AS(parse_formula("exists in (x in y)"), ParseError);
  CHECK_THROWS_AS(parse_formula("x y"), ParseError);
  CHECK_THROWS_AS(parse_formula("x in y", {.require_closed = true}), FormulaError);
  CHECK_NOTHROW(parse_formula("$0 in $1", {.require_closed = true}));
}

TEST_CASE("substitute examples") {
  Formula f = substitute(parse_formula("x in y"), "x", 3);
  CHECK(to_string(f) == "$3 in y");
  Formula closed = parse_formula("exists z (z in $0)");
  CHECK(same_formula(substitute(closed, "x", 1), closed));
  CHECK_THROWS_AS(substitute(parse_formula("exists z (z in x)"), "z", 0), FormulaError);
}

namespace {

Formula random_formula(std::mt19937_64& rng, int budget) {
  std::uniform_int_distribution<int> pick(0, 6);
  const char* vars[] = {"x", "y", "z"};
  auto term = [&]() {
    if (rng() % 3 == 0) return Term::constant(static_cast<int>(rng() % 4));
    return Term::variable(vars[rng() % 3]);
  };
  int c = budget <= 0 ? static_cast<int>(rng() % 2) : pick(rng);
  switch (c) {
    case 0: return member(term(), term());
    case 1: return equal(term(), term());
    case 2: return negate(random_formula(rng, budget - 1));
    case 3: return conj(random_formula(rng, budget - 1), random_formula(rng, budget - 1));
    case 4: return disj(random_formula(rng, budget - 1), random_formula(rng, budget - 1));
    case 5: return implies(random_formula(rng, budget - 1), random_formula(rng, budget - 1));
    default: return exists(vars[rng() % 3], random_formula(rng, budget - 1));
  }
}

}  // namespace

TEST_CASE("parse inverts print") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Formula f = random_formula(rng, 5);
    std::string text = to_string(f);
    Formula g = parse_formula(text);
    CHECK(same_formula(f, g));
    CHECK(to_string(g) == text);
  }
}

TEST_CASE("finite structure evaluation") {
  // D = {0, 1, 2} with 0 in 1, 0 in 2, 1 in 2 (the ordinal 3).
  FiniteStructure s{3, {{false, true, true}, {false, false, true}, {false, false, false}}};
  CHECK(witnesses(parse_formula("forall z (!z in x)"), "x", s) == std::vector<int>{0});
  CHECK(witnesses(parse_formula("x = x"), "x", s).size() == 3);
  CHECK(witnesses(parse_formula("exists z (z in x & exists w (w in z))"), "x", s) == std::vector<int>{2});
  std::vector<int> consts{1, 2};
  CHECK(holds(parse_formula("$0 in $1"), s, {}, consts));
  CHECK_FALSE(holds(parse_formula("$1 in $0"), s, {}, consts));
  CHECK_THROWS_AS(witnesses(parse_formula("x in y"), "x", s), FormulaError);
  CHECK(depth(parse_formula("!(x in y & y in x)")) == 3);
  CHECK(quantifier_free(parse_formula("!(x in y & y in x)")));
}
