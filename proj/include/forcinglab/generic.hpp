#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "forcinglab/filter.hpp"
#include "forcinglab/names.hpp"
#include "forcinglab/poset.hpp"

namespace forcinglab {

/// A generic filter together with, for small posets, a witness member for
/// every dense subset.
struct GenericSet {
  Filter filter;
  int atom = -1;  // the minimal element generating the filter
  bool certified = false;
  std::vector<std::pair<Bits, int>> certificate;  // (dense set, member of the filter in it)
};

/// Streams every dense subset of a poset (subsets meeting every lower cone)
/// without materializing the powerset.
class DenseSubsetStream {
 public:
  static constexpr std::size_t kMaxElements = 24;

  /// Throws CapExceeded above kMaxElements elements.
  explicit DenseSubsetStream(const Poset& P);
  /// Next dense subset, or nullopt when exhausted.
  std::optional<Bits> next();

 private:
  const Poset& P_;
  std::uint64_t mask_ = 0;
  std::uint64_t end_ = 0;
  std::vector<std::uint64_t> cones_;  // lower cone of each element as a mask
};

std::vector<Bits> dense_subsets(const Poset& P);

/// Filters meeting every dense subset. For finite posets these are exactly
/// the upward closures of the minimal elements; for posets with at most
/// `brute_force_limit` elements the list is also recomputed from the
/// definition (all subsets as filter candidates, all dense subsets) and the
/// two answers are compared, throwing std::logic_error on disagreement.
std::vector<GenericSet> enumerate_generics(const Poset& P, std::size_t brute_force_limit = 10);

/// Filters meeting every dense subset, by brute force over all subsets.
std::vector<Bits> generic_filters_by_definition(const Poset& P);

/// Meets every dense subset (enumerated; requires a small poset).
bool meets_every_dense_subset(const Poset& P, const Bits& s);

/// p forces f: U_p is contained in ||f||.
bool forces(TruthSession& session, int p, const Formula& f, std::span<const NameId> constants,
            std::span<const NameId> range = {});

}  // namespace forcinglab
