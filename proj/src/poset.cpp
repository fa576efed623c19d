#include "forcinglab/poset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace forcinglab {

namespace {

std::uint64_t next_poset_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

Poset Poset::from_relation(std::size_t n, std::span<const std::pair<int, int>> less, int top,
                           std::vector<std::string> labels) {
  if (n == 0) throw PosetError(PosetError::Kind::Empty, "poset must have at least one element");
  if (n > kMaxElements) {
    throw PosetError(PosetError::Kind::TooLarge,
                     "poset has " + std::to_string(n) + " elements; limit is " + std::to_string(kMaxElements));
  }
  if (top < 0 || static_cast<std::size_t>(top) >= n) {
    throw PosetError(PosetError::Kind::DanglingElement, "top element out of range");
  }
  // up[i] = {j : i <= j}
  std::vector<Bits> up(n);
  for (std::size_t i = 0; i < n; ++i) up[i].set(i);
  for (auto [a, b] : less) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n) {
      throw PosetError(PosetError::Kind::DanglingElement, "relation mentions an unknown element");
    }
    up[a].set(b);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (up[i].test(k)) up[i] |= up[k];
    }
  }
  Poset p;
  p.id_ = next_poset_id();
  p.top_ = top;
  p.up_ = up;
  p.down_.assign(n, Bits{});
  for (std::size_t i = 0; i < n; ++i) {
    for_each_bit(up[i], [&](int j) { p.down_[j].set(i); });
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && up[i].test(j) && up[j].test(i)) {
        throw PosetError(PosetError::Kind::Cycle, "order relation has a cycle through elements " +
                                                      std::to_string(i) + " and " + std::to_string(j));
      }
    }
    if (!up[i].test(top)) {
      throw PosetError(PosetError::Kind::TopNotMaximal,
                       "top element does not dominate element " + std::to_string(i));
    }
  }
  p.all_ = prefix_bits(n);
  p.atom_pos_.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (p.down_[i].count() == 1) {
      p.atom_pos_[i] = static_cast<int>(p.atoms_.size());
      p.atoms_.push_back(static_cast<int>(i));
      p.atom_bits_.set(i);
    }
  }
  // In a finite poset two elements are compatible iff some minimal element
  // lies below both.
  p.compat_.assign(n, Bits{});
  for (int a : p.atoms_) {
    const Bits& above = p.up_[a];
    for_each_bit(above, [&](int i) { p.compat_[i] |= above; });
  }
  if (labels.empty()) {
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  }
  p.labels_ = std::move(labels);
  return p;
}

Poset Poset::from_labels(const std::vector<std::string>& elements,
                         std::span<const std::pair<std::string, std::string>> less, const std::string& top) {
  if (elements.empty()) throw PosetError(PosetError::Kind::Empty, "poset must have at least one element");
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (!index.emplace(elements[i], static_cast<int>(i)).second) {
      throw PosetError(PosetError::Kind::DanglingElement, "duplicate element id '" + elements[i] + "'");
    }
  }
  auto lookup = [&](const std::string& s) {
    auto it = index.find(s);
    if (it == index.end()) throw PosetError(PosetError::Kind::DanglingElement, "unknown element id '" + s + "'");
    return it->second;
  };
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(less.size());
  for (const auto& [a, b] : less) pairs.emplace_back(lookup(a), lookup(b));
  return from_relation(elements.size(), pairs, lookup(top), elements);
}

Poset Poset::point() { return from_relation(1, {}, 0, {"1"}); }

Poset Poset::antichain(std::size_t k) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::string> labels{"1"};
  for (std::size_t i = 1; i <= k; ++i) {
    pairs.emplace_back(static_cast<int>(i), 0);
    labels.push_back(std::string(1, static_cast<char>('a' + (i - 1) % 26)) +
                     (i > 26 ? std::to_string(i) : std::string{}));
  }
  return from_relation(k + 1, pairs, 0, labels);
}

std::string Poset::label(int p) const { return labels_.at(p); }

std::vector<std::pair<int, int>> Poset::hasse_edges() const {
  std::vector<std::pair<int, int>> edges;
  const int n = static_cast<int>(size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a == b || !leq(a, b)) continue;
      Bits between = up_[a] & down_[b];
      if (between.count() == 2) edges.emplace_back(a, b);
    }
  }
  return edges;
}

bool Poset::same_order(const Poset& other) const {
  return top_ == other.top_ && down_ == other.down_;
}

RegularCut::RegularCut(const Poset& p, const Cut& c) : cut_(c) {
  if (c.owner != p.id()) throw std::invalid_argument("cut belongs to a different poset");
  if (!is_regular(p, c.members)) throw std::invalid_argument("cut is not regular");
}

RegularCut make_regular_unchecked(std::uint64_t owner, const Bits& members) {
  RegularCut r;
  r.cut_ = Cut{owner, members};
  return r;
}

bool is_downward_closed(const Poset& p, const Bits& s) {
  bool ok = true;
  for_each_bit(s, [&](int x) {
    if ((p.down(x) & ~s).any()) ok = false;
  });
  return ok;
}

Bits downward_closure(const Poset& p, const Bits& s) {
  Bits out;
  for_each_bit(s, [&](int x) { out |= p.down(x); });
  return out;
}

Cut make_cut(const Poset& p, const Bits& s) {
  if (!is_downward_closed(p, s)) throw std::invalid_argument("set is not downward closed");
  return Cut{p.id(), s};
}

Cut principal_cut(const Poset& P, int p) { return Cut{P.id(), P.down(p)}; }

std::optional<std::pair<int, int>> separativity_witness(const Poset& P) {
  const int n = static_cast<int>(P.size());
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (P.leq(p, q)) continue;
      // need r <= p with r incompatible with q
      if ((P.down(p) & ~P.compat(q)).none()) return std::make_pair(p, q);
    }
  }
  return std::nullopt;
}

bool is_separative(const Poset& P) { return !separativity_witness(P).has_value(); }

SeparativeQuotient separative_quotient(const Poset& P) {
  const int n = static_cast<int>(P.size());
  std::vector<int> cls(n, -1);
  std::vector<int> reps;
  for (int x = 0; x < n; ++x) {
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if (P.compat(x) == P.compat(reps[c])) {
        cls[x] = static_cast<int>(c);
        break;
      }
    }
    if (cls[x] < 0) {
      cls[x] = static_cast<int>(reps.size());
      reps.push_back(x);
    }
  }
  // [x] <= [y] iff every z <= x is compatible with y.
  std::vector<std::pair<int, int>> pairs;
  const int m = static_cast<int>(reps.size());
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (a != b && (P.down(reps[a]) & ~P.compat(reps[b])).none()) pairs.emplace_back(a, b);
    }
  }
  std::vector<std::string> labels;
  for (int r : reps) labels.push_back(P.label(r));
  Poset q = Poset::from_relation(static_cast<std::size_t>(m), pairs, cls[P.top()], labels);
  return SeparativeQuotient{std::move(q), std::move(cls)};
}

bool is_dense_below(const Poset& P, const Bits& s, int p) {
  if (p < 0 || static_cast<std::size_t>(p) >= P.size()) throw std::out_of_range("element not in poset");
  bool ok = true;
  for_each_bit(P.down(p), [&](int q) {
    if (ok && (P.down(q) & s).none()) ok = false;
  });
  return ok;
}

bool is_dense(const Poset& P, const Bits& s) { return is_dense_below(P, s, P.top()); }

RegularCut complement_cut(const Poset& P, const Bits& u) {
  Bits out;
  const int n = static_cast<int>(P.size());
  for (int p = 0; p < n; ++p) {
    if ((P.compat(p) & u).none()) out.set(p);
  }
  return make_regular_unchecked(P.id(), out);
}

RegularCut regularize(const Poset& P, const Bits& u) {
  return complement_cut(P, complement_cut(P, u).members());
}

bool is_regular(const Poset& P, const Bits& u) {
  return is_downward_closed(P, u) && regularize(P, u).members() == u;
}

namespace {

// Invariant refinement: start from (|down|, |up|) and refine by the sorted
// class lists of lower and upper covers until stable.
std::vector<int> refine_classes(const Poset& P) {
  const int n = static_cast<int>(P.size());
  std::vector<int> cls(n);
  {
    std::map<std::tuple<int, std::size_t, std::size_t>, int> ids;
    for (int x = 0; x < n; ++x) ids.emplace(std::make_tuple(x == P.top() ? 0 : 1, P.down(x).count(), P.up(x).count()), 0);
    int next = 0;
    for (auto& [k, v] : ids) v = next++;
    for (int x = 0; x < n; ++x) cls[x] = ids[std::make_tuple(x == P.top() ? 0 : 1, P.down(x).count(), P.up(x).count())];
  }
  for (;;) {
    std::vector<std::vector<int>> sig(n);
    for (int x = 0; x < n; ++x) {
      std::vector<int> d, u;
      for_each_bit(P.down(x), [&](int y) { d.push_back(cls[y]); });
      for_each_bit(P.up(x), [&](int y) { u.push_back(cls[y]); });
      std::sort(d.begin(), d.end());
      std::sort(u.begin(), u.end());
      sig[x].push_back(cls[x]);
      sig[x].insert(sig[x].end(), d.begin(), d.end());
      sig[x].push_back(-1);
      sig[x].insert(sig[x].end(), u.begin(), u.end());
    }
    std::map<std::vector<int>, int> ids;
    for (int x = 0; x < n; ++x) ids.emplace(sig[x], 0);
    int next = 0;
    for (auto& [k, v] : ids) v = next++;
    std::vector<int> refined(n);
    for (int x = 0; x < n; ++x) refined[x] = ids[sig[x]];
    const auto count = [](const std::vector<int>& c) {
      return std::set<int>(c.begin(), c.end()).size();
    };
    if (count(refined) == count(cls)) return refined;
    cls = std::move(refined);
  }
}

}  // namespace

std::string canonical_form(const Poset& P) {
  const int n = static_cast<int>(P.size());
  std::vector<int> cls = refine_classes(P);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cls[a] < cls[b]; });
  // cell boundaries
  std::vector<std::pair<int, int>> cells;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && cls[order[j]] == cls[order[i]]) ++j;
    cells.emplace_back(i, j);
    i = j;
  }
  double perms = 1;
  for (auto [a, b] : cells) {
    for (int k = 2; k <= b - a; ++k) perms *= k;
  }
  if (perms > 2e6) throw CapExceeded("canonical_form: too many candidate relabelings");

  std::string best;
  auto encode = [&]() {
    std::string s;
    s.reserve(static_cast<std::size_t>(n) * n + 8);
    s += std::to_string(n);
    s += ':';
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s += P.leq(order[i], order[j]) ? '1' : '0';
    }
    return s;
  };
  // Iterate all products of per-cell permutations.
  for (auto [a, b] : cells) std::sort(order.begin() + a, order.begin() + b);
  for (;;) {
    std::string s = encode();
    if (best.empty() || s < best) best = std::move(s);
    std::size_t c = 0;
    for (; c < cells.size(); ++c) {
      auto [a, b] = cells[c];
      if (std::next_permutation(order.begin() + a, order.begin() + b)) break;
    }
    if (c == cells.size()) break;
  }
  return best;
}

Poset parse_poset(std::string_view text) {
  std::vector<std::string> elements;
  std::unordered_map<std::string, int> seen;
  std::vector<std::pair<std::string, std::string>> less;
  std::optional<std::string> top;
  auto add = [&](const std::string& e) {
    if (seen.emplace(e, static_cast<int>(elements.size())).second) elements.push_back(e);
  };
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, op, b;
    if (!(ls >> a)) continue;
    if (a == "top:" || a.rfind("top:", 0) == 0) {
      std::string id = a.size() > 4 ? a.substr(4) : std::string{};
      if (id.empty() && !(ls >> id)) {
        throw PosetError(PosetError::Kind::Parse, "line " + std::to_string(lineno) + ": missing top id");
      }
      top = id;
      add(id);
      continue;
    }
    if (!(ls >> op >> b) || op != "<") {
      throw PosetError(PosetError::Kind::Parse, "line " + std::to_string(lineno) + ": expected '<id> < <id>'");
    }
    add(a);
    add(b);
    less.emplace_back(a, b);
  }
  if (!top) throw PosetError(PosetError::Kind::Parse, "missing 'top: <id>' line");
  return Poset::from_labels(elements, less, *top);
}

std::string format_poset(const Poset& p) {
  std::ostringstream out;
  out << "top: " << p.label(p.top()) << "\n";
  for (auto [a, b] : p.hasse_edges()) out << p.label(a) << " < " << p.label(b) << "\n";
  return out.str();
}

}  // namespace forcinglab

namespace forcinglab {

std::vector<Poset> posets_of_size(std::size_t n) {
  if (n == 0) return {};
  std::vector<Poset> level{Poset::point()};
  for (std::size_t m = 2; m <= n; ++m) {
    std::map<std::string, Poset> next;
    for (const Poset& P : level) {
      const int k = static_cast<int>(P.size());
      // Add a new minimal element below a nonempty up-set.
      for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        Bits u;
        for (int i = 0; i < k; ++i) {
          if (mask >> i & 1) u.set(i);
        }
        bool upward = true;
        for_each_bit(u, [&](int x) {
          if ((P.up(x) & ~u).any()) upward = false;
        });
        if (!upward) continue;
        std::vector<std::pair<int, int>> pairs;
        for (auto [a, b] : P.hasse_edges()) pairs.emplace_back(a, b);
        for_each_bit(u, [&](int x) { pairs.emplace_back(k, x); });
        Poset Q = Poset::from_relation(static_cast<std::size_t>(k + 1), pairs, P.top());
        std::string key = canonical_form(Q);
        next.emplace(std::move(key), std::move(Q));
      }
    }
    level.clear();
    for (auto& [key, Q] : next) level.push_back(std::move(Q));
  }
  return level;
}

std::vector<Poset> separative_posets(std::size_t max_elements, std::size_t max_atoms) {
  std::map<std::pair<std::size_t, std::string>, Poset> found;
  if (max_elements >= 1 && max_atoms >= 1) {
    Poset pt = Poset::point();
    found.emplace(std::make_pair(std::size_t{1}, canonical_form(pt)), std::move(pt));
  }
  for (std::size_t k = 2; k <= max_atoms && k + 1 <= max_elements; ++k) {
    // Atom sets strictly between singletons and the full set.
    std::vector<std::uint32_t> middle;
    for (std::uint32_t s = 1; s < (1u << k) - 1; ++s) {
      if (std::popcount(s) >= 2) middle.push_back(s);
    }
    const std::size_t room = max_elements - k - 1;
    std::vector<std::uint32_t> chosen;
    auto emit = [&]() {
      std::vector<std::uint32_t> sets;
      for (std::uint32_t i = 0; i < k; ++i) sets.push_back(1u << i);
      sets.insert(sets.end(), chosen.begin(), chosen.end());
      sets.push_back((1u << k) - 1);
      std::vector<std::pair<int, int>> pairs;
      for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = 0; b < sets.size(); ++b) {
          if (a != b && (sets[a] & ~sets[b]) == 0) pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
        }
      }
      Poset Q = Poset::from_relation(sets.size(), pairs, static_cast<int>(sets.size() - 1));
      std::string key = canonical_form(Q);
      found.emplace(std::make_pair(Q.size(), std::move(key)), std::move(Q));
    };
    auto rec = [&](auto&& self, std::size_t from) -> void {
      emit();
      if (chosen.size() == room) return;
      for (std::size_t i = from; i < middle.size(); ++i) {
        chosen.push_back(middle[i]);
        self(self, i + 1);
        chosen.pop_back();
      }
    };
    rec(rec, 0);
  }
  std::vector<Poset> out;
  for (auto& [key, Q] : found) out.push_back(std::move(Q));
  return out;
}

}  // namespace forcinglab
