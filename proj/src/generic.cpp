#include "forcinglab/generic.hpp"

#include <stdexcept>

namespace forcinglab {

bool is_filter(const Poset& P, const Bits& s) {
  if (!s.test(P.top())) return false;
  bool ok = true;
  for_each_bit(s, [&](int x) {
    if ((P.up(x) & ~s).any()) ok = false;
  });
  if (!ok) return false;
  for_each_bit(s, [&](int x) {
    for_each_bit(s, [&](int y) {
      if (ok && (P.down(x) & P.down(y) & s).none()) ok = false;
    });
  });
  return ok;
}

DenseSubsetStream::DenseSubsetStream(const Poset& P) : P_(P) {
  if (P.size() > kMaxElements) {
    throw CapExceeded("dense subset enumeration over " + std::to_string(P.size()) + " elements");
  }
  end_ = std::uint64_t{1} << P.size();
  for (int p = 0; p < static_cast<int>(P.size()); ++p) {
    std::uint64_t c = 0;
    for_each_bit(P.down(p), [&](int q) { c |= std::uint64_t{1} << q; });
    cones_.push_back(c);
  }
}

std::optional<Bits> DenseSubsetStream::next() {
  while (mask_ < end_) {
    std::uint64_t m = mask_++;
    bool dense = true;
    for (std::uint64_t c : cones_) {
      if ((c & m) == 0) {
        dense = false;
        break;
      }
    }
    if (!dense) continue;
    Bits b;
    for (std::size_t i = 0; i < P_.size(); ++i) {
      if (m >> i & 1) b.set(i);
    }
    return b;
  }
  return std::nullopt;
}

std::vector<Bits> dense_subsets(const Poset& P) {
  std::vector<Bits> out;
  DenseSubsetStream s(P);
  while (auto d = s.next()) out.push_back(*d);
  return out;
}

bool meets_every_dense_subset(const Poset& P, const Bits& s) {
  DenseSubsetStream stream(P);
  while (auto d = stream.next()) {
    if ((*d & s).none()) return false;
  }
  return true;
}

std::vector<Bits> generic_filters_by_definition(const Poset& P) {
  const std::size_t n = P.size();
  if (n > 16) throw CapExceeded("brute-force generic enumeration over " + std::to_string(n) + " elements");
  std::vector<Bits> filters;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    Bits b;
    for (std::size_t i = 0; i < n; ++i) {
      if (m >> i & 1) b.set(i);
    }
    if (is_filter(P, b)) filters.push_back(b);
  }
  std::vector<bool> alive(filters.size(), true);
  DenseSubsetStream stream(P);
  while (auto d = stream.next()) {
    for (std::size_t i = 0; i < filters.size(); ++i) {
      if (alive[i] && (filters[i] & *d).none()) alive[i] = false;
    }
  }
  std::vector<Bits> out;
  for (std::size_t i = 0; i < filters.size(); ++i) {
    if (alive[i]) out.push_back(filters[i]);
  }
  return out;
}

std::vector<GenericSet> enumerate_generics(const Poset& P, std::size_t brute_force_limit) {
  std::vector<GenericSet> out;
  for (int a : P.atoms()) out.push_back(GenericSet{principal_filter(P, a), a, false, {}});
  if (P.size() <= brute_force_limit) {
    std::vector<Bits> by_def = generic_filters_by_definition(P);
    bool same = by_def.size() == out.size();
    for (const GenericSet& g : out) {
      bool found = false;
      for (const Bits& b : by_def) found = found || b == g.filter.members;
      same = same && found;
    }
    if (!same) throw std::logic_error("generic filters disagree with the atom characterization");
    std::vector<Bits> dense = dense_subsets(P);
    for (GenericSet& g : out) {
      for (const Bits& d : dense) g.certificate.emplace_back(d, first_bit(d & g.filter.members));
      g.certified = true;
    }
  }
  return out;
}

bool forces(TruthSession& session, int p, const Formula& f, std::span<const NameId> constants,
            std::span<const NameId> range) {
  const BoolAlgebra& A = session.algebra();
  return A.leq(A.principal(p), session.value(f, constants, range));
}

}  // namespace forcinglab
