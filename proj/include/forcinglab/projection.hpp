#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "forcinglab/boolalg.hpp"
#include "forcinglab/formula.hpp"
#include "forcinglab/iteration.hpp"
#include "forcinglab/names.hpp"

namespace forcinglab {

/// How the cut map is computed. Only Regularized is the real map; the other
/// two exist so tests can feed the checkers a wrong one.
enum class PrimeMode {
  Regularized,  // closure of the pointwise image
  ImageOnly,    // pointwise image, downward closed, not regularized
  UpwardImage,  // closure of everything above the image (not a homomorphism)
};

/// Stage j of the quotient seen from a generic of P_alpha, i.e. the forcing
/// P_{alpha, alpha+j}. Stage 0 is a point. For j >= 1 conditions are in
/// function form over the atoms of stage j-1, exactly like iteration stages.
struct QuotientStage {
  PosetPtr poset;
  std::vector<StageCondition> conditions;  // j >= 1
  std::map<StageCondition, int> index;
  /// Quotient atom position -> the atom of P_{alpha+j} it corresponds to.
  std::vector<int> full_atom;
  /// Element of P_{alpha+j} -> its projection, or -1 when the alpha-prefix
  /// is not in G.
  std::vector<int> pi;
  /// r.o.(P_{alpha+j}) and r.o. of this stage; null above the algebra cap.
  std::shared_ptr<const BoolAlgebra> source, target;
  /// Cut map as a table over source algebra indices (when small enough).
  std::vector<BoolAlgebra::Elem> prime;

  int find(const StageCondition& c) const;
};

/// A generic G = up(g) of P_alpha and the maps pi, pi', pi'' into every later
/// quotient stage. Immutable after construction.
class ProjectionContext {
 public:
  /// Throws std::invalid_argument if g is not an atom of P_alpha (the
  /// filter up(g) would not be generic) or alpha is out of range.
  ProjectionContext(std::shared_ptr<const Iteration> it, std::size_t alpha, int g,
                    PrimeMode mode = PrimeMode::Regularized);

  const Iteration& iteration() const { return *it_; }
  const std::shared_ptr<const Iteration>& iteration_ptr() const { return it_; }
  std::size_t alpha() const { return alpha_; }
  int generic_atom() const { return g_; }
  const Branch& branch() const { return branch_; }
  PrimeMode mode() const { return mode_; }
  /// Number of quotient stages after stage 0 (N - alpha).
  std::size_t depth() const { return stages_.size() - 1; }
  const QuotientStage& quotient(std::size_t j) const { return stages_.at(j); }

  bool in_G(int p) const { return it_->poset(alpha_).leq(g_, p); }
  int pi(std::size_t j, int d) const { return stages_.at(j).pi.at(d); }

  /// Pointwise image of a set of P_{alpha+j}, skipping undefined points.
  Bits image(std::size_t j, const Bits& s) const;
  /// pi' on a cut given by its members; result per mode.
  Bits prime_bits(std::size_t j, const Bits& members) const;
  /// pi' on algebra indices. Throws std::invalid_argument if the result is
  /// not regular (possible only for the test modes).
  BoolAlgebra::Elem prime(std::size_t j, BoolAlgebra::Elem u) const;

  /// {d : d restricted to alpha is g and pi(d) in c}: the cut used to invert
  /// pi''. Throws std::invalid_argument if it is not regular.
  BoolAlgebra::Elem preimage_cut(std::size_t j, BoolAlgebra::Elem c) const;

 private:
  std::shared_ptr<const Iteration> it_;
  std::size_t alpha_;
  int g_;
  Branch branch_;
  PrimeMode mode_;
  std::vector<QuotientStage> stages_;
};

/// The contexts for every generic of P_alpha, in atom order. Used wherever a
/// statement says "r forces": that is, in every extension by a generic
/// through r.
std::vector<ProjectionContext> sibling_contexts(std::shared_ptr<const Iteration> it, std::size_t alpha,
                                                PrimeMode mode = PrimeMode::Regularized);

/// s followed by the tail of d: the condition of P_beta whose alpha-prefix is
/// s and whose later coordinates agree with d below d's own prefixes and are
/// 1 elsewhere. -1 if that is not a condition.
int concat(const Iteration& it, std::size_t alpha, int s, std::size_t beta, int d);

/// {s : s^d1 = s^d2} for d1, d2 of P_beta with a common alpha-prefix p.
/// With below_prefix, s ranges over s <= p; otherwise over all of P_alpha,
/// where s^d also reads the tail outside p and is not determined by the
/// class of d.
Bits merge_set(const Iteration& it, std::size_t alpha, std::size_t beta, int d1, int d2, bool below_prefix = true);

/// pi'' between two name stores, with the inverse construction. Not thread
/// safe.
class NameProjector {
 public:
  /// source must be over quotient(j).source and target over quotient(j).target.
  NameProjector(const ProjectionContext& ctx, std::size_t j, std::shared_ptr<NameStore> source,
                std::shared_ptr<NameStore> target);

  const ProjectionContext& context() const { return ctx_; }
  std::size_t stage() const { return j_; }
  NameStore& source() { return *source_; }
  NameStore& target() { return *target_; }
  const std::shared_ptr<NameStore>& source_ptr() const { return source_; }
  const std::shared_ptr<NameStore>& target_ptr() const { return target_; }

  /// pi''(x) = {(pi''(t), pi'(b)) : (t, b) in x}
  NameId operator()(NameId x);
  /// A source name y~ with pi''(y~) = y, built by rank.
  NameId preimage(NameId y);

 private:
  const ProjectionContext& ctx_;
  std::size_t j_;
  std::shared_ptr<NameStore> source_, target_;
  std::unordered_map<NameId, NameId> fwd_, back_;
};

// ------------------------------------------------------------------ reports

struct Counterexample {
  std::string inputs;
  std::string expected;
  std::string got;
};

struct CheckOutcome {
  std::string check;
  std::size_t cases = 0;
  std::size_t failures = 0;
  bool exhaustive = true;
  std::string note;
  std::vector<Counterexample> examples;  // first few failures

  bool ok() const { return failures == 0; }
  void fail(Counterexample c);
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckOutcome> checks;

  CheckOutcome& add(std::string check);
  bool ok() const;
  std::size_t failures() const;
  const CheckOutcome* find(const std::string& check) const;
};

struct UniverseBounds {
  int max_rank = 2;
  /// Largest complete universe enumerated on either side.
  std::uint64_t cap = 4096;
  /// Extra names drawn when a complete universe is out of reach.
  std::size_t sample = 48;
  /// Largest number of name pairs checked exhaustively; beyond it pairs are
  /// sampled.
  std::size_t max_pairs = 20000;
  std::uint64_t seed = 0;
};

/// Names on both sides of pi'' at stage j. The target universe is every
/// name of rank <= max_rank when that fits the cap, otherwise rank <= 1 plus
/// a sample. The source side is aligned with it: preimages of every target
/// name, all source names of small rank that fit, check names and a sample.
struct WorkingUniverse {
  std::vector<NameId> target;
  bool target_complete = false;
  int target_rank = 0;
  std::vector<NameId> source;
  bool source_complete = false;
  int source_rank = 0;
};

WorkingUniverse working_universe(NameProjector& proj, const UniverseBounds& bounds);

/// The maps at stage j: pi' is a complete homomorphism, pi'' is onto the
/// target universe, and pi'(||phi(a)||) = ||phi(pi'' a)|| for atomic phi over
/// source name pairs and for the given formulas (constants $0, $1;
/// quantifiers over aligned ranges). Default formulas are used when none are
/// given.
SuiteReport verify_projection_maps(const ProjectionContext& ctx, std::size_t j, const UniverseBounds& bounds,
                            std::span<const Formula> formulas = {});

/// Order, cut and forcing properties of the quotient at stage j for the context siblings[index]; siblings are
/// the contexts of every generic of the same P_alpha.
SuiteReport verify_projection_properties(const std::vector<ProjectionContext>& siblings, std::size_t index, std::size_t j,
                                     const UniverseBounds& bounds);

struct Factorization {
  std::size_t alpha = 0;
  int final_atom = -1;
  int g = -1;  // atom of P_alpha below which the restriction lies
  Bits G;      // the restriction of the final generic to P_alpha
  Bits H;      // its image in the last quotient stage
  SuiteReport report;
};

/// Splits the generic up(final_atom) of P_N into G on P_alpha and H on the
/// quotient, checks G and H generic and i_G(x) = i_H(pi'' x) on a working
/// universe. Throws std::invalid_argument if final_atom is not an atom.
Factorization factor_generic(std::shared_ptr<const Iteration> it, std::size_t alpha, int final_atom,
                             const UniverseBounds& bounds);

/// Rebuilds the shifted provider's iteration through G and compares it with
/// the quotient stages.
SuiteReport verify_quotient_shift(const ProjectionContext& ctx);

/// For each stage k, projects the final generic to the first quotient stage
/// over its restriction, reads the collapse components off Q_k and checks
/// that the union of each component's generic filter is an injection, total
/// when |X| < m. Components with |X| >= m are reported separately.
SuiteReport verify_collapse_injection(const CifsToy& toy, std::shared_ptr<const Iteration> it, int final_atom);

}  // namespace forcinglab
