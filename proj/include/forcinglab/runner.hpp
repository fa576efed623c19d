#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forcinglab/iteration.hpp"
#include "forcinglab/projection.hpp"

namespace forcinglab {

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s = {"lemma1", "theorem2", "projection-lemmas", "theorem16", "corollary15",
                                             "cifs"};
  return s;
}

struct RunConfig {
  std::string suite = "all";
  std::size_t max_poset = 3;   // elements of a step poset
  std::size_t max_stages = 2;  // iteration length
  int max_rank = 2;
  std::uint64_t cap = 4096;  // complete name universe bound
  std::size_t sample = 48;
  std::size_t max_pairs = 20000;
  std::size_t max_stage_size = 256;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::string out = "forcinglab-report.jsonl";

  /// Throws std::invalid_argument when a bound is outside the hard caps or
  /// the suite is unknown.
  void validate() const;
  bool selects(const std::string& suite_name) const { return suite == "all" || suite == suite_name; }
  UniverseBounds universe_bounds() const;
};

/// A step rule as a finite tree: node = the poset given to a generic of the
/// stage (nullopt for undef), children one per atom of that poset (one child
/// for undef).
struct ProviderTree {
  std::size_t stages = 0;
  std::string code;  // "n<stages>" then preorder tokens, "-" separated
};

/// Token of a step poset: "u" for undef, "s<size>_<k>" for the k-th
/// separative poset of that size in the library's canonical order.
std::string step_token(const std::optional<PosetPtr>& q);
std::optional<PosetPtr> step_from_token(const std::string& token);

/// Every provider tree with 1..max_stages stages over separative step posets
/// of at most max_poset elements, one per isomorphism class (children of a
/// node are identified under the automorphisms of its poset).
std::vector<ProviderTree> generate_providers(std::size_t max_poset, std::size_t max_stages);

/// Throws std::invalid_argument on a malformed code.
StepProvider tree_provider(const std::string& code);

struct CifsInstance {
  std::string formula;  // empty: no formula components
  std::vector<LadderStep> ladder;
  std::string code;
};

std::vector<CifsInstance> generate_cifs(std::size_t max_stages, int max_rank);

struct Record {
  std::string suite;
  std::string instance;
  std::size_t order = 0;  // position of the check within its instance
  CheckOutcome outcome;
  bool skipped = false;  // instance beyond a cap

  std::string id() const { return suite + "/" + instance + "/" + outcome.check; }
};

struct RunResult {
  std::vector<Record> records;  // sorted by instance, suite, check order
  std::map<std::string, std::size_t> census;  // suite -> instances
  std::size_t counterexamples = 0;  // failing checks
  std::size_t skipped = 0;
  std::size_t inexhaustive = 0;
  double seconds = 0;

  int exit_status() const { return counterexamples ? 1 : 0; }
};

RunResult run_suites(const RunConfig& config);

/// Reruns the instance of a counterexample id under the config of the run
/// that produced it. Throws std::out_of_range when the id names no failing
/// record of that run.
RunResult replay(const RunConfig& config, const std::string& id);

void write_report(std::ostream& os, const RunConfig& config, const RunResult& result);
/// Reads the config echo and the failing record ids back from a report.
RunConfig read_report_config(std::istream& is, std::vector<std::string>* counterexample_ids = nullptr);
std::string summary_table(const RunResult& result);

}  // namespace forcinglab
