#include <map>

#include "doctest.h"
#include "forcinglab/generic.hpp"
#include "forcinglab/names.hpp"

using namespace forcinglab;
using Elem = BoolAlgebra::Elem;

namespace {

std::shared_ptr<NameStore> store_over(const Poset& P) {
  auto A = std::make_shared<const BoolAlgebra>(std::make_shared<const Poset>(P));
  return std::make_shared<NameStore>(A);
}

}  // namespace

TEST_CASE("HFSet basics") {
  HFSet e = HFSet::empty();
  HFSet one = HFSet::singleton(e);
  CHECK(HFSet::ordinal(2) == HFSet(std::vector<HFSet>{one, e}));
  CHECK(HFSet::ordinal(3).as_ordinal() == 3);
  CHECK(HFSet::singleton(one).as_ordinal() == -1);
  CHECK(HFSet::ordinal(2).str() == "{{}, {{}}}");
  CHECK(rank_segment(0).empty());
  CHECK(rank_segment(1).size() == 1);
  CHECK(rank_segment(2).size() == 2);
  CHECK(rank_segment(3).size() == 4);
  CHECK(rank_segment(4).size() == 16);
  CHECK(transitive_closure(HFSet::singleton(HFSet::ordinal(2))).size() == 3);
  CHECK(HFSet::ordinal(3).rank() == 3);
}

TEST_CASE("check names") {
  auto S = store_over(Poset::antichain(2));
  NameId e = S->check(HFSet::empty());
  CHECK(e == S->empty_name());
  CHECK(S->entries(e).empty());
  NameId one = S->check(HFSet::ordinal(1));
  REQUIRE(S->entries(one).size() == 1);
  CHECK(S->entries(one)[0].child == e);
  CHECK(S->entries(one)[0].cut == S->algebra().one());
  for (const HFSet& x : rank_segment(4)) {
    NameId n = S->check(x);
    for (int a : S->algebra().base().atoms()) {
      CHECK(evaluate(*S, n, principal_filter(S->algebra().base(), a)) == x);
    }
  }
}

TEST_CASE("canonical names and literal format") {
  auto S = store_over(Poset::antichain(2));
  NameId e = S->empty_name();
  NameId a = S->make({{e, 1}, {e, 2}});
  NameId b = S->make({{e, 3}});
  CHECK(a == b);
  CHECK(S->make({{e, 0}}) == e);
  CHECK(S->format(b) == "{({}, 3)}");
  CHECK(S->parse("{({}, 3)}") == b);
  CHECK(S->parse(" { ( { } , 1 ) , ( {({}, 3)} , 2 ) } ") == S->make({{e, 1}, {b, 2}}));
  CHECK_THROWS_AS(S->parse("{({}, 9)}"), ParseError);
  CHECK_THROWS_AS(S->parse("{({}, 1)"), ParseError);
}

TEST_CASE("truth value examples") {
  Poset P = Poset::antichain(2);  // top 0, a 1, b 2
  auto S = store_over(P);
  TruthSession T(S);
  const BoolAlgebra& A = S->algebra();
  for (const HFSet& x : rank_segment(3)) {
    NameId n = S->check(x);
    CHECK(T.equal(n, n) == A.one());
  }
  NameId e = S->empty_name();
  NameId y = S->make({{e, A.principal(1)}});
  CHECK(T.member(e, y) == A.principal(1));
  CHECK(T.equal(y, e) == A.principal(2));
  std::vector<NameId> consts{e, y};
  CHECK(T.value(parse_formula("$0 in $1"), consts) == A.principal(1));
  CHECK_THROWS_AS(T.value(parse_formula("x in $1"), consts), FormulaError);
  CHECK_THROWS_AS(T.value(parse_formula("$0 in $7"), consts), FormulaError);

  CHECK(evaluate(*S, y, principal_filter(P, 1)) == HFSet::ordinal(1));
  CHECK(evaluate(*S, y, principal_filter(P, 2)) == HFSet::empty());
  CHECK(evaluate(*S, e, principal_filter(P, 2)) == HFSet::empty());
}

TEST_CASE("forces examples") {
  Poset P = Poset::antichain(2);
  auto S = store_over(P);
  TruthSession T(S);
  NameId e = S->empty_name();
  NameId y = S->make({{e, S->algebra().principal(1)}});
  std::vector<NameId> consts{e, y};
  CHECK(forces(T, P.top(), parse_formula("$0 = $0"), consts));
  CHECK(forces(T, 1, parse_formula("$0 in $1"), consts));
  CHECK_FALSE(forces(T, 2, parse_formula("$0 in $1"), consts));
  CHECK_FALSE(forces(T, P.top(), parse_formula("$0 in $1"), consts));
}

TEST_CASE("universe sizes") {
  auto S1 = store_over(Poset::point());
  auto S2 = store_over(Poset::antichain(2));
  CHECK(name_universe(S1, 0, 100).names.size() == 1);
  CHECK(name_universe(S2, 0, 100).names.size() == 1);
  auto u1 = name_universe(S1, 1, 100);
  CHECK(u1.names.size() == 2);
  CHECK(name_universe(S2, 1, 100).names.size() == 4);
  CHECK(name_universe(S2, 2, 1000).names.size() == 256);
  CHECK(universe_size(8, 2) == 16777216);
  CHECK(universe_size(16, 2) == UINT64_MAX);
  CHECK_THROWS_AS(name_universe(S2, 2, 255), CapExceeded);
  auto u = name_universe(S2, 2, 1000);
  for (std::size_t i = 1; i < u.names.size(); ++i) CHECK(S2->rank(u.names[i - 1]) <= S2->rank(u.names[i]));
}

TEST_CASE("truth lemma and forcing on small posets") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const Poset& P : posets_of_size(n)) {
      if (P.atoms().size() > 2) continue;  // rank-2 universe over 8 elements is too large here
      auto S = store_over(P);
      TruthSession T(S);
      const BoolAlgebra& A = S->algebra();
      auto U = name_universe(S, 2, 1000);
      auto generics = enumerate_generics(P);
      std::vector<std::map<NameId, HFSet>> val(generics.size());
      for (std::size_t g = 0; g < generics.size(); ++g) {
        Evaluator ev(*S, generics[g].filter);
        for (NameId x : U.names) val[g][x] = ev(x);
      }
      for (NameId x : U.names) {
        for (NameId y : U.names) {
          Elem mem = T.member(x, y), eq = T.equal(x, y);
          for (std::size_t g = 0; g < generics.size(); ++g) {
            const Bits& G = generics[g].filter.members;
            bool in_ext = val[g][y].contains(val[g][x]);
            bool eq_ext = val[g][x] == val[g][y];
            CHECK(((A.members(mem) & G).any()) == in_ext);
            CHECK(((A.members(eq) & G).any()) == eq_ext);
            // some p in G forces it
            bool forced_mem = false;
            for_each_bit(G, [&](int p) { forced_mem = forced_mem || A.leq(A.principal(p), mem); });
            CHECK(forced_mem == in_ext);
          }
          if (eq == A.one()) {
            for (std::size_t g = 0; g < generics.size(); ++g) CHECK(val[g][x] == val[g][y]);
          }
          // p forces iff true in every generic extension through p
          for (int p = 0; p < static_cast<int>(P.size()); ++p) {
            bool all = true;
            for (std::size_t g = 0; g < generics.size(); ++g) {
              if (generics[g].filter.contains(p)) all = all && val[g][y].contains(val[g][x]);
            }
            CHECK(A.leq(A.principal(p), mem) == all);
          }
        }
      }
    }
  }
}
