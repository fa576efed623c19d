#include "forcinglab/boolalg.hpp"

#include <sstream>
#include <stdexcept>

namespace forcinglab {

BoolAlgebra::BoolAlgebra(PosetPtr base, std::size_t max_atoms) : base_(std::move(base)) {
  if (!base_) throw std::invalid_argument("null base poset");
  k_ = base_->atoms().size();
  const std::size_t limit = std::min(max_atoms, kHardMaxAtoms);
  if (k_ > limit) {
    throw CapExceeded("algebra over " + std::to_string(k_) + " atoms exceeds the enumeration bound of " +
                      std::to_string(limit) + " atoms");
  }
  full_ = static_cast<Elem>((std::uint64_t{1} << k_) - 1);
  const int n = static_cast<int>(base_->size());
  elem_atoms_.assign(n, 0);
  for (int p = 0; p < n; ++p) {
    Elem m = 0;
    for_each_bit(base_->atoms_below(p), [&](int a) { m |= Elem{1} << base_->atom_index(a); });
    elem_atoms_[p] = m;
  }
  if (size() <= 4096) {
    cache_.resize(size());
    for (std::size_t e = 0; e < size(); ++e) {
      Bits b;
      for (int p = 0; p < n; ++p) {
        if ((elem_atoms_[p] & ~static_cast<Elem>(e)) == 0) b.set(p);
      }
      cache_[e] = b;
    }
  }
}

Bits BoolAlgebra::members(Elem e) const {
  if (e > full_) throw std::out_of_range("algebra element out of range");
  if (!cache_.empty()) return cache_[e];
  Bits b;
  for (int p = 0; p < static_cast<int>(base_->size()); ++p) {
    if ((elem_atoms_[p] & ~e) == 0) b.set(p);
  }
  return b;
}

BoolAlgebra::Elem BoolAlgebra::index_of(const Bits& m) const {
  Elem e = 0;
  for (std::size_t i = 0; i < k_; ++i) {
    if (m.test(base_->atoms()[i])) e |= Elem{1} << i;
  }
  if (members(e) != m) throw std::invalid_argument("set is not a regular cut");
  return e;
}

BoolAlgebra::Elem BoolAlgebra::index_of(const RegularCut& c) const {
  if (c.owner() != owner()) throw std::invalid_argument("cut belongs to a different algebra");
  return index_of(c.members());
}

BoolAlgebra::Elem BoolAlgebra::product(std::span<const Elem> family) const {
  Elem r = full_;
  for (Elem e : family) r &= e;
  return r;
}

BoolAlgebra::Elem BoolAlgebra::sum(std::span<const Elem> family) const {
  Elem r = 0;
  for (Elem e : family) r |= e;
  return r;
}

RegularCut BoolAlgebra::product(std::span<const RegularCut> family) const {
  Bits r = base_->all();
  for (const RegularCut& c : family) {
    if (c.owner() != owner()) throw std::invalid_argument("mixed-algebra operands");
    r &= c.members();
  }
  return make_regular_unchecked(owner(), r);
}

RegularCut BoolAlgebra::sum(std::span<const RegularCut> family) const {
  Bits r;
  for (const RegularCut& c : family) {
    if (c.owner() != owner()) throw std::invalid_argument("mixed-algebra operands");
    r |= c.members();
  }
  return regularize(*base_, r);
}

BoolAlgebra::Elem BoolAlgebra::meet_literal(Elem a, Elem b) const { return index_of(members(a) & members(b)); }

BoolAlgebra::Elem BoolAlgebra::join_literal(Elem a, Elem b) const {
  return index_of(regularize(*base_, members(a) | members(b)).members());
}

BoolAlgebra::Elem BoolAlgebra::complement_literal(Elem a) const {
  return index_of(complement_cut(*base_, members(a)).members());
}

std::string BoolAlgebra::describe(Elem e) const {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (std::size_t i = 0; i < k_; ++i) {
    if (!(e >> i & 1)) continue;
    if (!first) out << ',';
    out << base_->label(base_->atoms()[i]);
    first = false;
  }
  out << '}';
  return out.str();
}

RoAlgebra ro_algebra(const Poset& P, std::size_t max_atoms) {
  if (is_separative(P)) {
    std::vector<int> id(P.size());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
    return RoAlgebra{BoolAlgebra(std::make_shared<const Poset>(P), max_atoms), false, std::move(id)};
  }
  auto q = separative_quotient(P);
  auto base = std::make_shared<const Poset>(std::move(q.poset));
  return RoAlgebra{BoolAlgebra(base, max_atoms), true, std::move(q.map)};
}

namespace {

constexpr std::size_t kKeptCounterexamples = 8;

void record(HomReport& r, const std::string& law, std::vector<BoolAlgebra::Elem> family, BoolAlgebra::Elem expected,
            BoolAlgebra::Elem got) {
  ++r.violations;
  if (r.counterexamples.size() < kKeptCounterexamples) {
    r.counterexamples.push_back(HomCounterexample{law, std::move(family), expected, got});
  }
}

}  // namespace

HomReport check_complete_hom(std::span<const BoolAlgebra::Elem> h, const BoolAlgebra& A, const BoolAlgebra& B,
                             std::size_t literal_family_limit) {
  using Elem = BoolAlgebra::Elem;
  if (h.size() != A.size()) throw std::invalid_argument("map is not total on the source algebra");
  for (Elem v : h) {
    if (v > B.one()) throw std::invalid_argument("map value outside the target algebra");
  }
  HomReport r;
  if (h[A.zero()] != B.zero()) {
    r.preserves_zero_one = false;
    record(r, "zero", {A.zero()}, B.zero(), h[A.zero()]);
  }
  if (h[A.one()] != B.one()) {
    r.preserves_zero_one = false;
    record(r, "one", {A.one()}, B.one(), h[A.one()]);
  }
  for (Elem a = 0; a <= A.one(); ++a) {
    Elem expected = B.complement(h[a]);
    Elem got = h[A.complement(a)];
    if (expected != got) {
      r.preserves_complement = false;
      record(r, "complement", {a}, expected, got);
    }
  }
  const std::size_t n = A.size();
  if (n <= literal_family_limit) {
    // Every subfamily of A, encoded as a mask over the elements of A.
    for (std::uint64_t fam = 0; fam < (std::uint64_t{1} << n); ++fam) {
      Elem prodA = A.one(), sumA = A.zero(), prodB = B.one(), sumB = B.zero();
      for (std::size_t e = 0; e < n; ++e) {
        if (!(fam >> e & 1)) continue;
        prodA = A.meet(prodA, static_cast<Elem>(e));
        sumA = A.join(sumA, static_cast<Elem>(e));
        prodB = B.meet(prodB, h[e]);
        sumB = B.join(sumB, h[e]);
      }
      ++r.families_checked;
      if (h[prodA] != prodB || h[sumA] != sumB) {
        std::vector<Elem> family;
        for (std::size_t e = 0; e < n; ++e) {
          if (fam >> e & 1) family.push_back(static_cast<Elem>(e));
        }
        if (h[prodA] != prodB) {
          r.preserves_all_products = false;
          record(r, "product", family, prodB, h[prodA]);
        }
        if (h[sumA] != sumB) {
          r.preserves_all_sums = false;
          record(r, "sum", family, sumB, h[sumA]);
        }
      }
    }
  } else {
    r.exhaustive_families = false;
    for (Elem a = 0; a <= A.one(); ++a) {
      for (Elem b = 0; b <= A.one(); ++b) {
        ++r.families_checked;
        Elem pe = B.meet(h[a], h[b]), pg = h[A.meet(a, b)];
        if (pe != pg) {
          r.preserves_all_products = false;
          record(r, "product", {a, b}, pe, pg);
        }
        Elem se = B.join(h[a], h[b]), sg = h[A.join(a, b)];
        if (se != sg) {
          r.preserves_all_sums = false;
          record(r, "sum", {a, b}, se, sg);
        }
      }
    }
  }
  return r;
}

LawReport check_laws(const BoolAlgebra& A) {
  using Elem = BoolAlgebra::Elem;
  LawReport r;
  auto fail = [&](const std::string& what) {
    if (r.failures.size() < 16) r.failures.push_back(what);
  };
  const Elem top = A.one();
  // Literal and mask operations agree; literal members are regular.
  for (Elem a = 0; a <= top; ++a) {
    ++r.checked;
    if (!is_regular(A.base(), A.members(a))) fail("element " + A.describe(a) + " is not regular");
    if (A.complement_literal(a) != A.complement(a)) fail("complement mismatch at " + A.describe(a));
    if (A.complement(A.complement(a)) != a) fail("double complement at " + A.describe(a));
    for (Elem b = 0; b <= top; ++b) {
      ++r.checked;
      Elem m = A.meet(a, b), j = A.join(a, b);
      if (A.meet_literal(a, b) != m) fail("meet mismatch at " + A.describe(a) + "," + A.describe(b));
      if (A.join_literal(a, b) != j) fail("join mismatch at " + A.describe(a) + "," + A.describe(b));
      if (m != A.meet(b, a) || j != A.join(b, a)) fail("commutativity");
      if (A.meet(a, A.join(a, b)) != a || A.join(a, A.meet(a, b)) != a) fail("absorption");
      if (A.complement(m) != A.join(A.complement(a), A.complement(b))) fail("de morgan (meet)");
      if (A.complement(j) != A.meet(A.complement(a), A.complement(b))) fail("de morgan (join)");
    }
  }
  if (A.size() <= 64) {
    for (Elem a = 0; a <= top; ++a) {
      for (Elem b = 0; b <= top; ++b) {
        for (Elem c = 0; c <= top; ++c) {
          ++r.checked;
          if (A.meet(a, A.meet(b, c)) != A.meet(A.meet(a, b), c)) fail("meet associativity");
          if (A.join(a, A.join(b, c)) != A.join(A.join(a, b), c)) fail("join associativity");
          if (A.meet(a, A.join(b, c)) != A.join(A.meet(a, b), A.meet(a, c))) fail("distributivity (meet over join)");
          if (A.join(a, A.meet(b, c)) != A.meet(A.join(a, b), A.join(a, c))) fail("distributivity (join over meet)");
        }
      }
    }
  }
  if (A.meet(0, top) != 0 || A.join(0, top) != top || A.complement(0) != top) fail("bounds");
  // Dense embedding: every nonzero element lies above some principal cut.
  for (Elem b = 1; b <= top; ++b) {
    ++r.checked;
    bool found = false;
    for (int p = 0; p < static_cast<int>(A.base().size()) && !found; ++p) {
      found = A.leq(A.principal(p), b) && A.principal(p) != 0;
    }
    if (!found) fail("no principal cut below " + A.describe(b));
  }
  return r;
}

}  // namespace forcinglab
