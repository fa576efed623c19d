#include <doctest.h>

#include <set>

#include "forcinglab/projection.hpp"
#include "oracles.hpp"

using namespace forcinglab;

namespace {

PosetPtr share(Poset p) { return std::make_shared<const Poset>(std::move(p)); }

PosetPtr A(std::size_t k) { return share(Poset::antichain(k)); }

std::shared_ptr<const Iteration> iterate(const StepProvider& p) {
  return std::make_shared<const Iteration>(build_iteration(p, {4, 256}));
}

StepProvider branching_provider() {
  return parse_provider_table(R"(
    define C = top: 0; 1 < 0; 2 < 0; 3 < 1; 4 < 1
    stage 0
    G:* -> A2
    stage 1
    G:0 -> C
    G:1 -> undef
    stage 2
    G:0.0 -> A2
    G:0.1 -> point
    G:* -> undef
  )");
}

// Q_2 is defined over some generics of P_2 and undefined over others.
StepProvider tree_like_partial() {
  return parse_provider_table(R"(
    stage 0
    G:* -> A2
    stage 1
    G:0 -> point
    G:1 -> A2
    stage 2
    G:0.0 -> A2
    G:1.0 -> undef
    G:1.1 -> A2
  )");
}

// The part of P_beta sitting over g, taken to its separative quotient: an
// independent description of the quotient forcing.
Poset over_generic(const Iteration& it, std::size_t alpha, int g, std::size_t beta) {
  const Poset& P = it.poset(beta);
  std::vector<int> keep;
  for (int d = 0; d < static_cast<int>(P.size()); ++d) {
    if (it.restrict(beta, d, alpha) == g) keep.push_back(d);
  }
  std::vector<std::pair<int, int>> less;
  int top = -1;
  for (std::size_t x = 0; x < keep.size(); ++x) {
    if (keep[x] == it.embed(alpha, g, beta)) top = static_cast<int>(x);
    for (std::size_t y = 0; y < keep.size(); ++y) {
      if (x != y && P.leq(keep[x], keep[y])) less.emplace_back(static_cast<int>(x), static_cast<int>(y));
    }
  }
  return separative_quotient(Poset::from_relation(keep.size(), less, top)).poset;
}

void require_ok(const SuiteReport& r) {
  for (const auto& c : r.checks) {
    INFO(r.suite << ": " << c.check << " " << (c.examples.empty() ? "" : c.examples[0].inputs + " expected " +
                                                                             c.examples[0].expected + " got " +
                                                                             c.examples[0].got));
    CHECK(c.ok());
  }
}

UniverseBounds small_bounds() {
  UniverseBounds b;
  b.max_rank = 1;
  b.cap = 512;
  b.sample = 12;
  b.max_pairs = 2000;
  return b;
}

}  // namespace

TEST_CASE("quotient stages") {
  SUBCASE("two A2 stages: P_{1,2} is Q_1") {
    auto it = iterate(constant_provider(2, A(2)));
    for (int g : it->poset(1).atoms()) {
      ProjectionContext ctx(it, 1, g);
      CHECK(ctx.depth() == 1);
      CHECK(ctx.quotient(0).poset->size() == 1);
      CHECK(canonical_form(*ctx.quotient(1).poset) == canonical_form(*A(2)));
    }
  }
  SUBCASE("over stage 0 the quotient is the whole iteration") {
    auto it = iterate(branching_provider());
    ProjectionContext ctx(it, 0, 0);
    for (std::size_t j = 0; j <= ctx.depth(); ++j) {
      CHECK(oracle::isomorphic(*ctx.quotient(j).poset, it->poset(j)));
    }
  }
  SUBCASE("matches the separative quotient of the part over g") {
    for (const auto& p : {branching_provider(), constant_provider(3, A(2)), constant_provider(2, A(3))}) {
      auto it = iterate(p);
      for (std::size_t alpha = 0; alpha <= it->stage_count(); ++alpha) {
        for (int g : it->poset(alpha).atoms()) {
          ProjectionContext ctx(it, alpha, g);
          for (std::size_t j = 0; j <= ctx.depth(); ++j) {
            INFO("alpha " << alpha << " g " << g << " j " << j);
            Poset expected = over_generic(*it, alpha, g, alpha + j);
            CHECK(oracle::isomorphic(*ctx.quotient(j).poset, expected));
          }
        }
      }
    }
  }
  SUBCASE("projection is monotone and defined exactly over G") {
    auto it = iterate(branching_provider());
    ProjectionContext ctx(it, 1, it->poset(1).atoms()[0]);
    const Poset& P = it->poset(3);
    for (int d = 0; d < static_cast<int>(P.size()); ++d) {
      CHECK((ctx.pi(2, d) >= 0) == ctx.in_G(it->restrict(3, d, 1)));
    }
  }
  SUBCASE("errors") {
    auto it = iterate(constant_provider(2, A(2)));
    CHECK_THROWS_AS(ProjectionContext(it, 1, it->poset(1).top()), std::invalid_argument);
    CHECK_THROWS_AS(ProjectionContext(it, 3, 0), std::invalid_argument);
  }
}

TEST_CASE("concat") {
  auto it = iterate(constant_provider(2, A(2)));
  const Poset& P2 = it->poset(2);
  for (int d = 0; d < static_cast<int>(P2.size()); ++d) {
    const int p = it->restrict(2, d, 1);
    // with s the prefix of d itself nothing changes
    CHECK(concat(*it, 1, p, 2, d) == d);
    for (int s = 0; s < static_cast<int>(it->poset(1).size()); ++s) {
      const int e = concat(*it, 1, s, 2, d);
      REQUIRE(e >= 0);
      CHECK(it->restrict(2, e, 1) == s);
      if (it->poset(1).leq(s, p)) CHECK(P2.leq(e, d));
    }
  }
  // concat over the whole chain of stages
  CHECK(concat(*it, 0, 0, 2, P2.top()) == P2.top());
}

TEST_CASE("cut and name maps") {
  auto it = iterate(constant_provider(2, A(2)));
  const int g = it->poset(1).atoms()[1];
  ProjectionContext ctx(it, 1, g);
  const QuotientStage& q = ctx.quotient(1);
  REQUIRE(q.source);
  REQUIRE(q.target);

  SUBCASE("pi' agrees with the oracle regularization") {
    for (BoolAlgebra::Elem u = 0; u < q.source->size(); ++u) {
      Bits img = ctx.image(1, q.source->members(u));
      Bits expected = oracle::complement(*q.poset, oracle::complement(*q.poset, img));
      CHECK(q.target->members(ctx.prime(1, u)) == expected);
    }
  }
  SUBCASE("preimages project back") {
    auto src = std::make_shared<NameStore>(q.source);
    auto tgt = std::make_shared<NameStore>(q.target);
    NameProjector proj(ctx, 1, src, tgt);
    auto u = name_universe(tgt, 1, 10000);
    for (NameId y : u.names) CHECK(proj(proj.preimage(y)) == y);
    // check names go to check names
    for (const auto& x : rank_segment(2)) CHECK(proj(src->check(x)) == tgt->check(x));
  }
  SUBCASE("stores over the wrong algebra are rejected") {
    auto src = std::make_shared<NameStore>(q.source);
    CHECK_THROWS_AS(NameProjector(ctx, 1, src, src), std::invalid_argument);
  }
}

TEST_CASE("cut and name map checks") {
  UniverseBounds b = small_bounds();
  SUBCASE("A2 iteration from every stage") {
    auto it = iterate(constant_provider(2, A(2)));
    for (std::size_t alpha = 0; alpha <= 2; ++alpha) {
      for (int g : it->poset(alpha).atoms()) {
        ProjectionContext ctx(it, alpha, g);
        for (std::size_t j = 0; j <= ctx.depth(); ++j) require_ok(verify_projection_maps(ctx, j, b));
      }
    }
  }
  SUBCASE("branching iteration") {
    auto it = iterate(branching_provider());
    for (int g : it->poset(1).atoms()) {
      ProjectionContext ctx(it, 1, g);
      require_ok(verify_projection_maps(ctx, ctx.depth(), b));
    }
  }
  SUBCASE("the upward image is caught") {
    auto it = iterate(constant_provider(2, A(2)));
    ProjectionContext ctx(it, 1, it->poset(1).atoms()[0], PrimeMode::UpwardImage);
    auto r = verify_projection_maps(ctx, 1, b);
    REQUIRE(r.find("cut map is a complete homomorphism"));
    CHECK_FALSE(r.find("cut map is a complete homomorphism")->ok());
    CHECK_FALSE(r.find("cut map is a complete homomorphism")->examples.empty());
  }
  SUBCASE("dropping regularization changes nothing on finite posets") {
    // images of regular cuts under pi are already regular here
    for (const auto& p : {branching_provider(), constant_provider(2, A(2)), constant_provider(2, A(3))}) {
      auto it = iterate(p);
      for (std::size_t alpha = 0; alpha < it->stage_count(); ++alpha) {
        for (int g : it->poset(alpha).atoms()) {
          ProjectionContext reg(it, alpha, g), raw(it, alpha, g, PrimeMode::ImageOnly);
          for (std::size_t j = 0; j <= reg.depth(); ++j) {
            const auto& A = *reg.quotient(j).source;
            for (BoolAlgebra::Elem u = 0; u < A.size(); ++u) {
              CHECK(raw.prime_bits(j, A.members(u)) == reg.prime_bits(j, A.members(u)));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("quotient property checks") {
  UniverseBounds b = small_bounds();
  for (const auto& p : {branching_provider(), constant_provider(2, A(2))}) {
    auto it = iterate(p);
    for (std::size_t alpha = 0; alpha < it->stage_count(); ++alpha) {
      auto sib = sibling_contexts(it, alpha);
      for (std::size_t i = 0; i < sib.size(); ++i) {
        for (std::size_t j = 1; j <= sib[i].depth(); ++j) {
          auto r = verify_projection_properties(sib, i, j, b);
          require_ok(r);
          CHECK(r.find("merge sets are regular"));
          CHECK(r.find("quotient principal cuts are images")->cases == sib[i].quotient(j).poset->size());
        }
      }
    }
  }
  SUBCASE("a wrong cut map fails the property checks") {
    auto it = iterate(constant_provider(2, A(2)));
    auto sib = sibling_contexts(it, 1, PrimeMode::UpwardImage);
    auto r = verify_projection_properties(sib, 0, 1, b);
    CHECK_FALSE(r.find("complements preserved")->ok());
  }
}

TEST_CASE("quotient equals the shifted iteration") {
  for (const auto& p : {branching_provider(), constant_provider(3, A(2))}) {
    auto it = iterate(p);
    for (std::size_t alpha = 0; alpha <= it->stage_count(); ++alpha) {
      for (int g : it->poset(alpha).atoms()) require_ok(verify_quotient_shift(ProjectionContext(it, alpha, g)));
    }
  }
}

TEST_CASE("factor_generic") {
  UniverseBounds b = small_bounds();
  auto it = iterate(branching_provider());
  const Poset& PN = it->poset(it->stage_count());
  for (std::size_t alpha = 0; alpha <= it->stage_count(); ++alpha) {
    for (int a : PN.atoms()) {
      auto f = factor_generic(it, alpha, a, b);
      require_ok(f.report);
      CHECK(f.G == it->poset(alpha).up(f.g));
    }
  }
  CHECK_THROWS_AS(factor_generic(it, 1, PN.top(), b), std::invalid_argument);
}

TEST_CASE("collapse unions") {
  SUBCASE("|X| < m: each union is a total injection") {
    auto toy = cifs_toy_iteration({parse_formula("forall z (!(z in x))")}, {{1, 2}, {0, 3}});
    auto it = iterate(toy->provider());
    for (int a : it->poset(it->stage_count()).atoms()) {
      auto r = verify_collapse_injection(*toy, it, a);
      require_ok(r);
      CHECK(r.find("collapse union is a total injection")->cases > 0);
    }
  }
  SUBCASE("|X| >= m: the union stops at m - 1") {
    auto toy = cifs_toy_iteration({}, {{2, 2}});
    auto it = iterate(toy->provider());
    for (int a : it->poset(1).atoms()) {
      auto r = verify_collapse_injection(*toy, it, a);
      require_ok(r);
      CHECK(r.find("collapse union stops at m-1")->cases == 1);
    }
  }
}

TEST_CASE("merge sets") {
  auto it = iterate(tree_like_partial());
  const Poset& P2 = it->poset(2);
  for (int d1 = 0; d1 < static_cast<int>(it->poset(3).size()); ++d1) {
    for (int d2 = 0; d2 < static_cast<int>(it->poset(3).size()); ++d2) {
      if (it->restrict(3, d1, 2) != it->restrict(3, d2, 2)) continue;
      CHECK(is_regular(P2, merge_set(*it, 2, 3, d1, d2)));
    }
  }
  // over all of P_2 the set depends on the tail outside the prefix and on
  // which prefixes admit a nontrivial tail; it is then not regular
  bool irregular = false;
  for (int d1 = 0; d1 < static_cast<int>(it->poset(3).size()); ++d1) {
    for (int d2 = 0; d2 < static_cast<int>(it->poset(3).size()); ++d2) {
      if (it->restrict(3, d1, 2) != it->restrict(3, d2, 2)) continue;
      irregular = irregular || !is_regular(P2, merge_set(*it, 2, 3, d1, d2, false));
    }
  }
  CHECK(irregular);
}
