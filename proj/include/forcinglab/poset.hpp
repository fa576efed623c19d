#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "forcinglab/bits.hpp"

namespace forcinglab {

class PosetError : public std::invalid_argument {
 public:
  enum class Kind { Empty, Cycle, TopNotMaximal, DanglingElement, TooLarge, Parse };

  PosetError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// A finite partial order with a maximal element. Elements are the dense
/// integers 0..size()-1. The order, its lower and upper cones, compatibility
/// and the minimal elements are precomputed; the object is immutable.
class Poset {
 public:
  /// Builds the reflexive-transitive closure of `less` (pairs (a, b) meaning
  /// a <= b) and validates it. Throws PosetError.
  static Poset from_relation(std::size_t n, std::span<const std::pair<int, int>> less, int top,
                             std::vector<std::string> labels = {});

  /// validate_poset over opaque string ids.
  static Poset from_labels(const std::vector<std::string>& elements,
                           std::span<const std::pair<std::string, std::string>> less,
                           const std::string& top);

  /// Single point {1}.
  static Poset point();
  /// k pairwise incompatible atoms under a top element; top has id 0.
  static Poset antichain(std::size_t k);

  std::size_t size() const { return down_.size(); }
  int top() const { return top_; }
  std::uint64_t id() const { return id_; }

  bool leq(int a, int b) const { return down_[b].test(a); }
  bool compatible(int a, int b) const { return compat_[a].test(b); }

  /// {q : q <= p}
  const Bits& down(int p) const { return down_[p]; }
  /// {q : p <= q}
  const Bits& up(int p) const { return up_[p]; }
  /// {q : q compatible with p}
  const Bits& compat(int p) const { return compat_[p]; }

  /// Minimal elements in increasing id order.
  const std::vector<int>& atoms() const { return atoms_; }
  const Bits& atom_bits() const { return atom_bits_; }
  Bits atoms_below(int p) const { return down_[p] & atom_bits_; }
  /// Position of an atom in atoms(), or -1.
  int atom_index(int p) const { return atom_pos_[p]; }

  const Bits& all() const { return all_; }

  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(int p) const;

  /// Strict Hasse edges (a, b): a < b with nothing strictly between.
  std::vector<std::pair<int, int>> hasse_edges() const;

  /// Same top and order, compared element-wise.
  bool same_order(const Poset& other) const;

 private:
  Poset() = default;

  std::uint64_t id_ = 0;
  int top_ = 0;
  std::vector<Bits> down_, up_, compat_;
  std::vector<int> atoms_;
  std::vector<int> atom_pos_;
  Bits atom_bits_, all_;
  std::vector<std::string> labels_;
};

using PosetPtr = std::shared_ptr<const Poset>;

/// Downward closed subset of a poset.
struct Cut {
  std::uint64_t owner = 0;
  Bits members;

  friend bool operator==(const Cut&, const Cut&) = default;
};

/// A cut that is stable under regularization: members = -(-members).
class RegularCut {
 public:
  RegularCut() = default;
  /// Throws std::invalid_argument if `c` is not regular in `p`.
  RegularCut(const Poset& p, const Cut& c);

  std::uint64_t owner() const { return cut_.owner; }
  const Bits& members() const { return cut_.members; }
  const Cut& cut() const { return cut_; }
  bool contains(int p) const { return cut_.members.test(p); }

  friend bool operator==(const RegularCut&, const RegularCut&) = default;

 private:
  friend RegularCut make_regular_unchecked(std::uint64_t owner, const Bits& members);
  Cut cut_;
};

RegularCut make_regular_unchecked(std::uint64_t owner, const Bits& members);

bool is_downward_closed(const Poset& p, const Bits& s);
Bits downward_closure(const Poset& p, const Bits& s);
Cut make_cut(const Poset& p, const Bits& s);

/// Principal cut U_p.
Cut principal_cut(const Poset& P, int p);

/// p <= q fails only if some r <= p is incompatible with q.
bool is_separative(const Poset& p);

/// (a, b) with a not <= b and every r <= a compatible with b, if any.
std::optional<std::pair<int, int>> separativity_witness(const Poset& p);

struct SeparativeQuotient {
  Poset poset;
  std::vector<int> map;  // element of input -> element of quotient
};

/// Quotient by x ~ y iff x and y are compatible with exactly the same
/// elements, ordered by "every extension of x is compatible with y".
SeparativeQuotient separative_quotient(const Poset& p);

/// For every q <= p there is r <= q with r in s.
bool is_dense_below(const Poset& P, const Bits& s, int p);
/// Dense below every element.
bool is_dense(const Poset& P, const Bits& s);

/// -u = {p : p incompatible with every member of u}. Accepts any subset.
RegularCut complement_cut(const Poset& P, const Bits& u);
inline RegularCut complement_cut(const Poset& P, const Cut& u) { return complement_cut(P, u.members); }

/// -(-u): the smallest regular cut containing u.
RegularCut regularize(const Poset& P, const Bits& u);
inline RegularCut regularize(const Poset& P, const Cut& u) { return regularize(P, u.members); }

bool is_regular(const Poset& P, const Bits& u);

/// Canonical form up to isomorphism (top fixed). Intended for small posets;
/// permutes elements only within invariant classes.
std::string canonical_form(const Poset& p);

/// Text format: `top: <id>` followed by Hasse edges `<id> < <id>`.
Poset parse_poset(std::string_view text);
std::string format_poset(const Poset& p);

/// Every poset with a maximal element on exactly n elements, one per
/// isomorphism class, in a deterministic order.
std::vector<Poset> posets_of_size(std::size_t n);

/// Separative posets with at most max_elements elements and max_atoms
/// minimal elements, one per isomorphism class. A finite poset is separative
/// iff p <= q exactly when the atoms below p are among those below q, so
/// these are built as families of atom sets.
std::vector<Poset> separative_posets(std::size_t max_elements, std::size_t max_atoms);

}  // namespace forcinglab
