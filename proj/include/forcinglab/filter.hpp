#pragma once

#include <cstdint>

#include "forcinglab/poset.hpp"

namespace forcinglab {

/// Upward closed, downward directed subset containing the top element.
struct Filter {
  std::uint64_t owner = 0;
  Bits members;

  bool contains(int p) const { return members.test(p); }
  friend bool operator==(const Filter&, const Filter&) = default;
};

/// The principal filter {q : p <= q}.
inline Filter principal_filter(const Poset& P, int p) { return Filter{P.id(), P.up(p)}; }

/// Checks the three filter axioms.
bool is_filter(const Poset& P, const Bits& s);

}  // namespace forcinglab
