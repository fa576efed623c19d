#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace forcinglab {

/// Hard upper bound on the number of elements of any materialized poset.
inline constexpr std::size_t kMaxElements = 256;

using Bits = std::bitset<kMaxElements>;

template <typename F>
inline void for_each_bit(const Bits& b, F&& f) {
  for (std::size_t i = b._Find_first(); i < kMaxElements; i = b._Find_next(i)) {
    f(static_cast<int>(i));
  }
}

inline int first_bit(const Bits& b) {
  std::size_t i = b._Find_first();
  return i < kMaxElements ? static_cast<int>(i) : -1;
}

/// Bits {0, ..., n-1}.
inline Bits prefix_bits(std::size_t n) {
  Bits b;
  for (std::size_t i = 0; i < n; ++i) b.set(i);
  return b;
}

/// Raised when a configured enumeration or size bound would be exceeded.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace forcinglab
