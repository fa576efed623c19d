#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "forcinglab/formula.hpp"
#include "forcinglab/names.hpp"
#include "forcinglab/poset.hpp"

namespace forcinglab {

/// Position of a generic of P_n: for each earlier stage k, the index of the
/// chosen atom of Q_k (0 when Q_k was undefined on that branch).
using Branch = std::vector<int>;

/// The stage rule: for stage n and a generic of P_n (given by its branch),
/// the separative poset Q_n defined in that extension, or nullopt when
/// nothing is defined there.
struct StepProvider {
  std::size_t stages = 0;
  std::function<std::optional<PosetPtr>(std::size_t n, const Branch& b)> rule;
};

/// Q_n = q at every stage and on every branch.
StepProvider constant_provider(std::size_t stages, std::optional<PosetPtr> q);

/// Stages alpha.. of `base` read through a generic of P_alpha given by its
/// branch: rule'(n, b) = rule(alpha + n, g ++ b).
StepProvider shifted_provider(const StepProvider& base, std::size_t alpha, const Branch& g);

/// Table provider text. Lines are
///   define <Name> = <poset text with ';' for newlines>
///   stage <n>
///   G:<branch> -> <poset-ref | undef>
/// where <branch> is the dotted atom choices of the generic ("*" matches any
/// generic of the stage, and is the only way to name the single generic of
/// stage 0) and <poset-ref> is `point`, `A<k>` (k atoms under a top) or a
/// defined name. `#` starts a comment. Throws std::invalid_argument.
StepProvider parse_provider_table(std::string_view text);

/// Tail entries of a stage condition.
inline constexpr int kNotBelow = -1;   // atom of the previous stage not below the prefix
inline constexpr int kUndefined = -2;  // Q is undefined in that extension; the coordinate is 1

/// A condition of P_{n+1} in function form: a prefix in P_n and, for every
/// atom a of P_n below the prefix, the element of Q_n(a) the tail name takes
/// in the extension by the generic through a. The tail 1 is stored as the
/// top of each Q_n(a).
struct StageCondition {
  int prefix = 0;
  std::vector<int> tail;  // indexed by atom position in P_n
  friend bool operator==(const StageCondition&, const StageCondition&) = default;
  friend auto operator<=>(const StageCondition&, const StageCondition&) = default;
};

struct IterationStage {
  std::size_t n = 0;
  PosetPtr poset;
  std::vector<StageCondition> conditions;  // by element id; empty at stage 0
  std::vector<Branch> branches;            // by atom position
  /// Q_n on each generic of this stage (filled for n < number of stages).
  std::vector<std::optional<PosetPtr>> step;

  /// Element id of (prefix, tail), or -1.
  int find(const StageCondition& c) const;
  /// Atom of this stage with the given branch, or -1.
  int atom_for_branch(const Branch& b) const;

  std::map<StageCondition, int> index;
};

struct IterationCaps {
  std::size_t max_stages = 4;
  std::size_t max_stage_size = 256;
};

class IterationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// P_0, ..., P_N for a finite-stage provider. P_0 is the one-point poset and
/// P_1 is isomorphic to Q_0 (or a point if Q_0 is undefined).
class Iteration {
 public:
  std::size_t stage_count() const { return stages_.size() - 1; }
  const IterationStage& stage(std::size_t n) const { return stages_.at(n); }
  const Poset& poset(std::size_t n) const { return *stages_.at(n).poset; }
  const StepProvider& provider() const { return provider_; }

  /// p in P_n restricted to its first m coordinates.
  int restrict(std::size_t n, int p, std::size_t m) const;
  /// p in P_m extended by ones up to stage n.
  int embed(std::size_t m, int p, std::size_t n) const;
  /// The tail at stage k < n of p in P_n is 1 (all tops or undefined).
  bool is_one_tail(std::size_t n, int p) const;

  /// Human readable form like "(a)^(x,1)".
  std::string describe(std::size_t n, int p) const;

 private:
  friend Iteration build_iteration(const StepProvider& provider, const IterationCaps& caps);
  StepProvider provider_;
  std::vector<IterationStage> stages_;
};

/// Throws IterationError for non-separative steps, CapExceeded for stage
/// bounds.
Iteration build_iteration(const StepProvider& provider, const IterationCaps& caps = {});

/// Size P_{n+1} would have, without building it.
std::uint64_t next_stage_size(const IterationStage& s, const std::vector<std::optional<PosetPtr>>& step);

/// A raw condition: one coordinate per stage, each the symbol 1 or a name
/// over r.o.(P_k) whose value in each extension is the von Neumann ordinal
/// of an element id of Q_k.
struct OneTail {};
struct NameTail {
  std::shared_ptr<NameStore> store;  // over the algebra of P_k
  NameId name;
};
using RawCoordinate = std::variant<OneTail, NameTail>;

struct CanonicalCondition {
  std::size_t stage = 0;  // after trimming trailing ones
  int element = 0;        // element of P_stage
  friend bool operator==(const CanonicalCondition&, const CanonicalCondition&) = default;
};

/// Evaluates name tails through every generic below the prefix, identifies
/// a tail naming the top of Q with 1, and trims trailing ones. Throws
/// IterationError if a name is not forced into Q by its prefix.
CanonicalCondition canonicalize_condition(const Iteration& it, const std::vector<RawCoordinate>& coords);

struct SeparativityStage {
  std::size_t n;
  std::size_t size;
  bool separative;
  std::optional<std::pair<int, int>> witness;  // (p, q): p not <= q, no r <= p incompatible with q
};

struct SeparativityReport {
  std::vector<SeparativityStage> stages;
  bool ok() const;
};

SeparativityReport check_stages_separative(const Iteration& it);
SeparativityReport check_stages_separative(const std::vector<PosetPtr>& stage_posets);

// ---------------------------------------------------------------- collapses

struct Collapse {
  PosetPtr poset;
  /// maps[e][x] = image of x under condition e, or -1.
  std::vector<std::vector<int>> maps;
};

/// Partial injections X -> {0..m-1} of size < m, ordered by reverse
/// inclusion, with the empty map as top.
Collapse collapse_poset(std::size_t x, int m);

/// sum over k < m, k <= x of C(x, k) * m! / (m - k)!
std::uint64_t collapse_count(std::size_t x, int m);

// ---------------------------------------------------------------- toy CIFS

struct LadderStep {
  int rank = 0;
  int m = 1;
};

struct CifsComponent {
  bool collapse = false;      // false: trivial one-point component
  std::optional<HFSet> witness;
  std::vector<HFSet> domain;  // members of the witness
  int m = 1;
  Collapse col;
};

struct CifsStepInfo {
  std::vector<HFSet> R;  // the structure (R, in) formulas are evaluated in
  std::vector<CifsComponent> components;  // 0: collapse of R; then one per formula
  PosetPtr product;
  std::vector<std::vector<int>> coords;  // product element -> component elements
};

/// Stage k offers the product of Col(R_k, m_k) and, per formula psi_i, the
/// collapse Col(X, m_k) of its unique witness X in (R_k, in), or a point.
/// R_k is the rank segment V_{rank_k} together with the transitive closure of
/// the range of the previous stage's generic injection (as von Neumann
/// ordinals), which is how each stage sees the generic added before it.
class CifsToy : public std::enable_shared_from_this<CifsToy> {
 public:
  CifsToy(std::vector<Formula> formulas, std::vector<LadderStep> ladder, std::size_t max_product = 256);

  std::size_t stage_count() const { return ladder_.size(); }
  const std::vector<Formula>& formulas() const { return formulas_; }
  const std::vector<LadderStep>& ladder() const { return ladder_; }
  const std::vector<std::string>& variables() const { return vars_; }

  /// Deterministic and memoized; safe to call from several threads.
  const CifsStepInfo& info(std::size_t k, const Branch& b) const;
  StepProvider provider() const;

 private:
  std::vector<Formula> formulas_;
  std::vector<std::string> vars_;
  std::vector<LadderStep> ladder_;
  std::size_t max_product_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<std::size_t, Branch>, std::shared_ptr<const CifsStepInfo>> memo_;
};

/// Throws FormulaError if a formula does not have exactly one free variable
/// and std::invalid_argument if the ladder is empty or m is not strictly
/// increasing.
std::shared_ptr<CifsToy> cifs_toy_iteration(std::vector<Formula> formulas, std::vector<LadderStep> ladder,
                                            std::size_t max_stages = IterationCaps{}.max_stages);

/// Product of posets with componentwise order; coords gives the tuple of
/// each product element.
PosetPtr product_poset(const std::vector<PosetPtr>& parts, std::vector<std::vector<int>>* coords,
                       std::size_t max_size = kMaxElements);

}  // namespace forcinglab
