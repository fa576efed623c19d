#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forcinglab/poset.hpp"

namespace forcinglab {

/// The complete Boolean algebra r.o.(P) of regular cuts of a finite poset.
///
/// In a finite poset every regular cut is determined by the minimal elements
/// it contains: U = {p : every atom below p lies in U}. Elements are therefore
/// indexed by atom masks (bit i = i-th atom of the base), which makes meet,
/// join and complement single mask operations. The *_literal operations work
/// on the member bitsets directly (intersection, regularized union,
/// incompatibility complement) and exist so the two views can be compared.
class BoolAlgebra {
 public:
  using Elem = std::uint32_t;

  static constexpr std::size_t kDefaultMaxAtoms = 12;
  static constexpr std::size_t kHardMaxAtoms = 20;

  /// Works for any finite poset. Throws CapExceeded if the base has more than
  /// max_atoms minimal elements.
  explicit BoolAlgebra(PosetPtr base, std::size_t max_atoms = kDefaultMaxAtoms);

  const Poset& base() const { return *base_; }
  const PosetPtr& base_ptr() const { return base_; }
  std::uint64_t owner() const { return base_->id(); }

  std::size_t atom_count() const { return k_; }
  std::size_t size() const { return std::size_t{1} << k_; }

  Elem zero() const { return 0; }
  Elem one() const { return full_; }
  Elem meet(Elem a, Elem b) const { return a & b; }
  Elem join(Elem a, Elem b) const { return a | b; }
  Elem complement(Elem a) const { return full_ & ~a; }
  bool leq(Elem a, Elem b) const { return (a & ~b) == 0; }

  /// Atom mask of the atoms below p.
  Elem atoms_of(int p) const { return elem_atoms_[p]; }
  /// Principal cut U_p.
  Elem principal(int p) const { return elem_atoms_[p]; }

  /// Member bitset of an element.
  Bits members(Elem e) const;
  RegularCut regular_cut(Elem e) const { return make_regular_unchecked(owner(), members(e)); }

  /// Index of a regular cut given by its members. Throws std::invalid_argument
  /// if the set is not a regular cut of the base.
  Elem index_of(const Bits& members) const;
  Elem index_of(const RegularCut& c) const;

  /// Product (intersection) and sum (regularized union) of a family; empty
  /// family gives one and zero respectively.
  Elem product(std::span<const Elem> family) const;
  Elem sum(std::span<const Elem> family) const;
  /// Same, on RegularCut values; throws std::invalid_argument on cuts from
  /// another algebra.
  RegularCut product(std::span<const RegularCut> family) const;
  RegularCut sum(std::span<const RegularCut> family) const;

  Elem meet_literal(Elem a, Elem b) const;
  Elem join_literal(Elem a, Elem b) const;
  Elem complement_literal(Elem a) const;

  /// Human readable atom-set form, e.g. "{a,b}".
  std::string describe(Elem e) const;

 private:
  PosetPtr base_;
  std::size_t k_ = 0;
  Elem full_ = 0;
  std::vector<Elem> elem_atoms_;
  std::vector<Bits> cache_;
};

struct RoAlgebra {
  BoolAlgebra algebra;
  bool quotiented = false;    // input was not separative
  std::vector<int> quotient;  // input element -> base element
};

/// r.o.(P) over the separative quotient of P (identity if already separative).
RoAlgebra ro_algebra(const Poset& P, std::size_t max_atoms = BoolAlgebra::kDefaultMaxAtoms);

struct HomCounterexample {
  std::string law;
  std::vector<BoolAlgebra::Elem> family;
  BoolAlgebra::Elem expected = 0;
  BoolAlgebra::Elem got = 0;
};

struct HomReport {
  bool preserves_zero_one = true;
  bool preserves_complement = true;
  bool preserves_all_products = true;
  bool preserves_all_sums = true;
  /// Every subfamily was enumerated. When false the algebra was too large and
  /// families were checked through the empty family, all pairs and
  /// complements, which determine every finite meet and join.
  bool exhaustive_families = true;
  std::uint64_t families_checked = 0;
  std::uint64_t violations = 0;
  std::vector<HomCounterexample> counterexamples;  // first few only

  bool ok() const { return preserves_zero_one && preserves_complement && preserves_all_products && preserves_all_sums; }
};

/// h is indexed by the elements of A and takes values in B.
HomReport check_complete_hom(std::span<const BoolAlgebra::Elem> h, const BoolAlgebra& A, const BoolAlgebra& B,
                             std::size_t literal_family_limit = 16);

struct LawReport {
  std::uint64_t checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Boolean algebra axioms over all pairs and triples, agreement of the mask
/// operations with the literal cut operations, and density of the principal
/// cuts in the nonzero elements.
LawReport check_laws(const BoolAlgebra& A);

}  // namespace forcinglab
