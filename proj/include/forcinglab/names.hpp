#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forcinglab/boolalg.hpp"
#include "forcinglab/filter.hpp"
#include "forcinglab/formula.hpp"

namespace forcinglab {

/// Hereditarily finite pure set with extensional equality. Members are kept
/// sorted and unique, so == and <=> compare by value.
class HFSet {
 public:
  HFSet() = default;
  explicit HFSet(std::vector<HFSet> members);

  static HFSet empty() { return HFSet(); }
  /// von Neumann ordinal n = {0, ..., n-1}.
  static HFSet ordinal(int n);
  static HFSet singleton(HFSet x);

  const std::vector<HFSet>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool contains(const HFSet& x) const;
  int rank() const;
  /// n if this is the ordinal n, else -1.
  int as_ordinal() const;

  /// {} / {{}, {{}}} style text.
  std::string str() const;

  friend bool operator==(const HFSet&, const HFSet&) = default;
  friend std::strong_ordering operator<=>(const HFSet& a, const HFSet& b);

 private:
  std::vector<HFSet> members_;
};

/// Members of x, their members, and so on (x itself excluded).
std::vector<HFSet> transitive_closure(const HFSet& x);
/// V_r: all hereditarily finite sets of rank < r, sorted.
std::vector<HFSet> rank_segment(int r);

using NameId = std::uint32_t;

struct NameEntry {
  NameId child;
  BoolAlgebra::Elem cut;
  friend bool operator==(const NameEntry&, const NameEntry&) = default;
};

/// Arena of canonical names over one algebra. A name is a finite set of
/// (name, nonzero cut) pairs with distinct children, sorted by child id;
/// entries with the zero cut are dropped and repeated children are merged
/// by joining their cuts. Structurally equal names get the same id.
///
/// Not thread safe: use one store per worker.
class NameStore {
 public:
  explicit NameStore(std::shared_ptr<const BoolAlgebra> algebra);

  const BoolAlgebra& algebra() const { return *algebra_; }
  const std::shared_ptr<const BoolAlgebra>& algebra_ptr() const { return algebra_; }

  NameId empty_name() const { return 0; }
  NameId make(std::vector<NameEntry> entries);
  const std::vector<NameEntry>& entries(NameId n) const { return names_[n].entries; }
  int rank(NameId n) const { return names_[n].rank; }
  std::size_t size() const { return names_.size(); }

  /// Cut attached to child c in n (zero if absent).
  BoolAlgebra::Elem value(NameId n, NameId c) const;

  /// x-check: {(y-check, one) : y in x}.
  NameId check(const HFSet& x);

  /// Nested literal `{(name, cut), ...}` with cuts as algebra indices.
  std::string format(NameId n) const;
  NameId parse(std::string_view text);

 private:
  struct Rec {
    std::vector<NameEntry> entries;
    int rank;
  };
  std::shared_ptr<const BoolAlgebra> algebra_;
  std::vector<Rec> names_;
  std::unordered_map<std::string, NameId> index_;
};

struct NameUniverse {
  std::shared_ptr<NameStore> store;
  int rank_bound = 0;
  std::vector<NameId> names;  // by rank, then enumeration order
};

/// Number of names of rank <= r over an algebra with `algebra_size`
/// elements, saturating at UINT64_MAX.
std::uint64_t universe_size(std::size_t algebra_size, int rank_bound);

/// All names of rank <= rank_bound. Throws CapExceeded if that would be more
/// than cap names.
NameUniverse name_universe(std::shared_ptr<NameStore> store, int rank_bound, std::uint64_t cap);

/// Boolean truth values with memo tables keyed by ordered name pairs. The
/// recursion for ||x in y|| and ||x = y|| descends in rank, so it is well
/// founded. Sessions are independent; one per thread.
class TruthSession {
 public:
  explicit TruthSession(std::shared_ptr<NameStore> store);

  NameStore& store() { return *store_; }
  const BoolAlgebra& algebra() const { return store_->algebra(); }

  /// sum over t in dom y of ||t = x|| * y(t)
  BoolAlgebra::Elem member(NameId x, NameId y);
  /// prod over t in dom x of (-x(t) + ||t in y||) * prod over t in dom y of (-y(t) + ||t in x||)
  BoolAlgebra::Elem equal(NameId x, NameId y);

  /// ||f|| with $k := constants[k]; quantifiers range over `range`.
  /// Throws FormulaError for free variables or unknown constants.
  BoolAlgebra::Elem value(const Formula& f, std::span<const NameId> constants, std::span<const NameId> range = {});

  std::size_t memo_size() const { return mem_.size() + eq_.size(); }

 private:
  BoolAlgebra::Elem eval(const Formula& f, std::span<const NameId> constants, std::span<const NameId> range,
                         std::vector<std::pair<std::string, NameId>>& env);

  std::shared_ptr<NameStore> store_;
  std::unordered_map<std::uint64_t, BoolAlgebra::Elem> mem_, eq_;
};

/// i_G: {i_G(x) : y(x) meets G}, with cuts compared as member bitsets.
HFSet evaluate(const NameStore& store, NameId n, const Filter& G);

/// Memoized evaluation of many names under one filter.
class Evaluator {
 public:
  Evaluator(const NameStore& store, Filter G);
  const HFSet& operator()(NameId n);

 private:
  const NameStore& store_;
  Filter G_;
  std::unordered_map<NameId, HFSet> memo_;
};

}  // namespace forcinglab
