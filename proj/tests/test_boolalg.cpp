#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "forcinglab/boolalg.hpp"
#include "oracles.hpp"

using namespace forcinglab;
using Elem = BoolAlgebra::Elem;

namespace {

BoolAlgebra algebra_of(const Poset& P) { return BoolAlgebra(std::make_shared<const Poset>(P)); }

std::string key(const Bits& b) { return b.to_string(); }

}  // namespace

TEST_CASE("ro_algebra examples") {
  BoolAlgebra A2 = algebra_of(Poset::antichain(2));
  CHECK(A2.size() == 4);
  std::set<std::string> got, want;
  for (Elem e = 0; e <= A2.one(); ++e) got.insert(key(A2.members(e)));
  for (const Bits& b : oracle::regular_cuts(Poset::antichain(2))) want.insert(key(b));
  CHECK(got == want);
  CHECK(algebra_of(Poset::point()).size() == 2);
  CHECK(algebra_of(Poset::antichain(3)).size() == 8);

  std::vector<std::pair<int, int>> chain{{1, 0}};
  auto ro = ro_algebra(Poset::from_relation(2, chain, 0));
  CHECK(ro.quotiented);
  CHECK(ro.algebra.size() == 2);
}

TEST_CASE("antichain algebras have 2^k elements") {
  for (std::size_t k = 1; k <= 4; ++k) {
    Poset P = Poset::antichain(k);
    CHECK(algebra_of(P).size() == (std::size_t{1} << k));
    CHECK(oracle::regular_cuts(P).size() == (std::size_t{1} << k));
  }
}

TEST_CASE("product and sum examples") {
  BoolAlgebra A = algebra_of(Poset::antichain(2));  // atoms a = bit 0, b = bit 1
  Elem a = A.principal(1), b = A.principal(2);
  std::vector<Elem> uu{a, a}, zu{0, b}, ab{a, b}, one{a}, zero{0};
  CHECK(A.product(uu) == a);
  CHECK(A.product(zu) == 0);
  CHECK(A.product(ab) == 0);
  CHECK(A.sum(ab) == A.one());
  CHECK(A.sum(one) == a);
  CHECK(A.sum(zero) == 0);
  CHECK(A.product(std::span<const Elem>{}) == A.one());
  CHECK(A.sum(std::span<const Elem>{}) == A.zero());

  std::vector<RegularCut> cuts{A.regular_cut(a), A.regular_cut(b)};
  CHECK(A.sum(cuts).members() == A.base().all());
  CHECK(A.product(cuts).members().none());
  BoolAlgebra other = algebra_of(Poset::antichain(2));
  std::vector<RegularCut> mixed{A.regular_cut(a), other.regular_cut(a)};
  CHECK_THROWS_AS(A.product(mixed), std::invalid_argument);
  CHECK_THROWS_AS(A.index_of(A.base().down(1) | A.base().down(2)), std::invalid_argument);
}

TEST_CASE("check_complete_hom examples") {
  BoolAlgebra A = algebra_of(Poset::antichain(2));
  std::vector<Elem> id(A.size());
  for (Elem e = 0; e < A.size(); ++e) id[e] = e;
  HomReport r = check_complete_hom(id, A, A);
  CHECK(r.ok());
  CHECK(r.exhaustive_families);
  CHECK(r.families_checked == 16);

  std::vector<Elem> ones(A.size(), A.one());
  HomReport bad = check_complete_hom(ones, A, A);
  CHECK_FALSE(bad.preserves_complement);
  CHECK_FALSE(bad.preserves_zero_one);
  bool found = false;
  for (const auto& c : bad.counterexamples) {
    if (c.law == "complement" && c.family == std::vector<Elem>{0}) {
      found = true;
      CHECK(c.expected == 0);        // -h(0) = -1 = 0
      CHECK(c.got == A.one());       // h(-0) = h(1) = 1
    }
  }
  CHECK(found);

  // A larger algebra goes through the pairwise route.
  BoolAlgebra B = algebra_of(Poset::antichain(5));
  std::vector<Elem> idB(B.size());
  for (Elem e = 0; e < B.size(); ++e) idB[e] = e;
  HomReport rb = check_complete_hom(idB, B, B);
  CHECK(rb.ok());
  CHECK_FALSE(rb.exhaustive_families);
}

TEST_CASE("laws hold on every separative poset with at most 5 elements") {
  auto posets = separative_posets(5, 5);
  CHECK(posets.size() == 5);
  for (const Poset& P : posets) {
    BoolAlgebra A = algebra_of(P);
    LawReport r = check_laws(A);
    CHECK(r.ok());
    CHECK(oracle::regular_cuts(P).size() == A.size());
  }
}

TEST_CASE("regular cuts match the powerset enumeration on all small posets") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const Poset& P : posets_of_size(n)) {
      BoolAlgebra A = algebra_of(P);
      std::set<std::string> got, want;
      for (Elem e = 0; e <= A.one(); ++e) got.insert(key(A.members(e)));
      for (const Bits& b : oracle::regular_cuts(P)) want.insert(key(b));
      CHECK(got == want);
      CHECK(check_laws(A).ok());
    }
  }
}

TEST_CASE("enumeration bound") {
  CHECK_THROWS_AS(BoolAlgebra(std::make_shared<const Poset>(Poset::antichain(13))), CapExceeded);
  CHECK_NOTHROW(BoolAlgebra(std::make_shared<const Poset>(Poset::antichain(13)), 13));
}
