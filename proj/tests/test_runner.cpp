#include <doctest.h>

#include <set>
#include <sstream>

#include "forcinglab/runner.hpp"
#include "oracles.hpp"

using namespace forcinglab;

namespace {

// Trees over {undef, point, A2} counted directly: a node is one of three
// choices; undef and point have one child tree, A2 an unordered pair.
std::size_t expected_trees(std::size_t stages) {
  std::size_t t = 3;
  for (std::size_t d = 2; d <= stages; ++d) t = t + t + t * (t + 1) / 2;
  return t;
}

std::string report_of(const RunConfig& c) {
  std::ostringstream os;
  write_report(os, c, run_suites(c));
  return os.str();
}

}  // namespace

TEST_CASE("provider generator") {
  SUBCASE("counts with step posets of at most three elements") {
    for (std::size_t n = 1; n <= 3; ++n) {
      auto trees = generate_providers(3, n);
      std::size_t with_n = 0;
      for (const auto& t : trees) with_n += t.stages == n;
      CHECK(with_n == expected_trees(n));
    }
    CHECK(expected_trees(3) == 102);
  }
  SUBCASE("posets of at most two elements give only the trivial providers") {
    auto trees = generate_providers(2, 1);
    std::set<std::string> codes;
    for (const auto& t : trees) codes.insert(t.code);
    CHECK(codes == std::set<std::string>{"n1-u", "n1-s1_0"});
  }
  SUBCASE("census is monotone in every bound") {
    std::size_t prev = 0;
    for (std::size_t p = 1; p <= 5; ++p) {
      const auto n = generate_providers(p, 2).size();
      CHECK(n >= prev);
      prev = n;
    }
    CHECK(generate_providers(3, 3).size() > generate_providers(3, 2).size());
    RunConfig a, b;
    a.suite = b.suite = "theorem16";
    a.max_rank = 1;
    b.max_rank = 2;
    a.max_stages = b.max_stages = 1;
    CHECK(run_suites(a).census == run_suites(b).census);
  }
  SUBCASE("codes are distinct and swapped children appear once") {
    auto trees = generate_providers(3, 2);
    std::set<std::string> codes;
    for (const auto& t : trees) CHECK(codes.insert(t.code).second);
    CHECK(codes.count("n2-s3_0-u-s1_0") + codes.count("n2-s3_0-s1_0-u") == 1);
  }
  SUBCASE("codes decode to the provider they name") {
    auto it = build_iteration(tree_provider("n2-s3_0-u-s3_0"), {4, 256});
    CHECK(it.poset(1).size() == 3);
    CHECK_FALSE(it.stage(1).step[0].has_value());
    CHECK(it.stage(1).step[1].has_value());
    CHECK_THROWS_AS(tree_provider("n2-s3_0-u"), std::invalid_argument);
    CHECK_THROWS_AS(tree_provider("n2-s3_0-u-u-u"), std::invalid_argument);
    CHECK_THROWS_AS(tree_provider("x2-u"), std::invalid_argument);
    CHECK_THROWS_AS(step_from_token("s3_7"), std::invalid_argument);
  }
  SUBCASE("step tokens round trip") {
    for (std::size_t s = 1; s <= 5; ++s) {
      for (const Poset& P : separative_posets(s, s)) {
        auto q = std::make_shared<const Poset>(P);
        auto back = step_from_token(step_token(q));
        REQUIRE(back);
        CHECK(canonical_form(**back) == canonical_form(P));
      }
    }
    CHECK(step_token(std::nullopt) == "u");
  }
}

TEST_CASE("runs") {
  SUBCASE("lemma1 sweep") {
    RunConfig c;
    c.suite = "lemma1";
    c.max_poset = 4;
    c.seed = 1;
    auto r = run_suites(c);
    CHECK(r.counterexamples == 0);
    CHECK(r.census.at("lemma1") == generate_providers(4, 2).size());
  }
  SUBCASE("theorem2 sweep") {
    RunConfig c;
    c.suite = "theorem2";
    c.max_stages = 2;
    c.max_rank = 2;
    auto r = run_suites(c);
    CHECK(r.counterexamples == 0);
    CHECK(r.census.at("theorem2") > 0);
  }
  SUBCASE("collapse counts") {
    RunConfig c;
    c.suite = "cifs";
    c.max_stages = 1;
    auto r = run_suites(c);
    CHECK(r.counterexamples == 0);
    std::size_t counted = 0;
    for (const auto& rec : r.records) {
      if (rec.outcome.check == "collapse size matches the count of partial injections") ++counted;
    }
    CHECK(counted == 16);
    for (int x = 0; x <= 3; ++x) {
      for (int m = 1; m <= 4; ++m) CHECK(collapse_count(x, m) == oracle::partial_injections(x, m));
    }
  }
  SUBCASE("records are sorted and reports are identical across runs and worker counts") {
    RunConfig c;
    c.max_stages = 2;
    c.suite = "projection-lemmas";
    c.workers = 1;
    const std::string one = report_of(c);
    c.workers = 3;
    CHECK(report_of(c) == one);
    auto r = run_suites(c);
    for (std::size_t i = 1; i < r.records.size(); ++i) CHECK(r.records[i - 1].instance <= r.records[i].instance);
  }
  SUBCASE("config validation") {
    RunConfig c;
    c.suite = "nope";
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.suite = "all";
    c.max_stages = 9;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
}

TEST_CASE("report round trip and replay") {
  RunConfig c;
  c.suite = "corollary15";
  c.max_stages = 2;
  c.seed = 7;
  auto r = run_suites(c);
  std::ostringstream os;
  write_report(os, c, r);
  std::istringstream is(os.str());
  std::vector<std::string> ids;
  RunConfig back = read_report_config(is, &ids);
  CHECK(back.seed == 7);
  CHECK(back.max_stages == 2);
  CHECK(back.suite == "corollary15");
  CHECK(ids.empty());

  // replaying an instance reruns exactly its checks
  const Record& rec = r.records.back();
  auto again = replay(back, rec.id());
  REQUIRE_FALSE(again.records.empty());
  for (const auto& x : again.records) CHECK(x.instance == rec.instance);
  CHECK_THROWS_AS(replay(back, "corollary15/n2-u-u/a9/g0/x"), std::exception);
  CHECK_THROWS_AS(replay(back, "nonsense"), std::out_of_range);
}
