#include "forcinglab/names.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <limits>
#include <set>

namespace forcinglab {

// ---------------------------------------------------------------- HFSet

HFSet::HFSet(std::vector<HFSet> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

std::strong_ordering operator<=>(const HFSet& a, const HFSet& b) {
  return std::lexicographical_compare_three_way(a.members_.begin(), a.members_.end(), b.members_.begin(),
                                                b.members_.end());
}

HFSet HFSet::ordinal(int n) {
  std::vector<HFSet> ms;
  for (int i = 0; i < n; ++i) ms.push_back(ordinal(i));
  return HFSet(std::move(ms));
}

HFSet HFSet::singleton(HFSet x) { return HFSet(std::vector<HFSet>{std::move(x)}); }

bool HFSet::contains(const HFSet& x) const { return std::binary_search(members_.begin(), members_.end(), x); }

int HFSet::rank() const {
  int r = 0;
  for (const HFSet& m : members_) r = std::max(r, m.rank() + 1);
  return r;
}

int HFSet::as_ordinal() const {
  const int n = static_cast<int>(members_.size());
  for (int i = 0; i < n; ++i) {
    if (members_[i].as_ordinal() < 0) return -1;
  }
  // members are ordinals; it is an ordinal iff they are exactly 0..n-1
  std::vector<int> ks;
  for (const HFSet& m : members_) ks.push_back(m.as_ordinal());
  std::sort(ks.begin(), ks.end());
  for (int i = 0; i < n; ++i) {
    if (ks[i] != i) return -1;
  }
  return n;
}

std::string HFSet::str() const {
  std::string s = "{";
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) s += ", ";
    s += members_[i].str();
  }
  return s + "}";
}

std::vector<HFSet> transitive_closure(const HFSet& x) {
  std::set<HFSet> seen;
  std::vector<HFSet> stack(x.members().begin(), x.members().end());
  while (!stack.empty()) {
    HFSet y = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(y).second) continue;
    for (const HFSet& z : y.members()) stack.push_back(z);
  }
  return {seen.begin(), seen.end()};
}

std::vector<HFSet> rank_segment(int r) {
  std::vector<HFSet> v;
  for (int i = 0; i < r; ++i) {
    if (v.size() > 20) throw CapExceeded("rank segment too large");
    std::vector<HFSet> next;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << v.size()); ++m) {
      std::vector<HFSet> ms;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (m >> j & 1) ms.push_back(v[j]);
      }
      next.emplace_back(std::move(ms));
    }
    v = std::move(next);
  }
  std::sort(v.begin(), v.end());
  return v;
}

// ---------------------------------------------------------------- NameStore

namespace {

std::string key_of(const std::vector<NameEntry>& es) {
  std::string k(es.size() * sizeof(NameEntry), '\0');
  for (std::size_t i = 0; i < es.size(); ++i) {
    std::memcpy(k.data() + i * sizeof(NameEntry), &es[i], sizeof(NameEntry));
  }
  return k;
}

}  // namespace

NameStore::NameStore(std::shared_ptr<const BoolAlgebra> algebra) : algebra_(std::move(algebra)) {
  names_.push_back(Rec{{}, 0});
  index_.emplace(std::string{}, 0);
}

NameId NameStore::make(std::vector<NameEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const NameEntry& a, const NameEntry& b) { return a.child < b.child; });
  std::vector<NameEntry> canon;
  for (const NameEntry& e : entries) {
    if (e.child >= names_.size()) throw std::invalid_argument("unknown child name");
    if (e.cut > algebra_->one()) throw std::invalid_argument("cut outside the algebra");
    if (e.cut == algebra_->zero()) continue;
    if (!canon.empty() && canon.back().child == e.child) {
      canon.back().cut = algebra_->join(canon.back().cut, e.cut);
    } else {
      canon.push_back(e);
    }
  }
  std::string k = key_of(canon);
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  int r = 0;
  for (const NameEntry& e : canon) r = std::max(r, names_[e.child].rank + 1);
  NameId id = static_cast<NameId>(names_.size());
  names_.push_back(Rec{std::move(canon), r});
  index_.emplace(std::move(k), id);
  return id;
}

BoolAlgebra::Elem NameStore::value(NameId n, NameId c) const {
  const auto& es = names_[n].entries;
  auto it = std::lower_bound(es.begin(), es.end(), c, [](const NameEntry& e, NameId v) { return e.child < v; });
  return it != es.end() && it->child == c ? it->cut : algebra_->zero();
}

NameId NameStore::check(const HFSet& x) {
  std::vector<NameEntry> es;
  for (const HFSet& y : x.members()) es.push_back(NameEntry{check(y), algebra_->one()});
  return make(std::move(es));
}

std::string NameStore::format(NameId n) const {
  std::string s = "{";
  const auto& es = names_[n].entries;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) s += ", ";
    s += "(" + format(es[i].child) + ", " + std::to_string(es[i].cut) + ")";
  }
  return s + "}";
}

NameId NameStore::parse(std::string_view text) {
  std::size_t pos = 0;
  auto skip = [&]() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip();
    if (pos >= text.size() || text[pos] != c) {
      throw ParseError(pos, std::string("expected '") + c + "'");
    }
    ++pos;
  };
  auto rec = [&](auto&& self) -> NameId {
    expect('{');
    std::vector<NameEntry> es;
    skip();
    if (pos < text.size() && text[pos] == '}') {
      ++pos;
      return make({});
    }
    for (;;) {
      expect('(');
      NameId child = self(self);
      expect(',');
      skip();
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) throw ParseError(pos, "expected cut index");
      unsigned long cut = std::stoul(std::string(text.substr(start, pos - start)));
      if (cut > algebra_->one()) throw ParseError(start, "cut index outside the algebra");
      expect(')');
      es.push_back(NameEntry{child, static_cast<BoolAlgebra::Elem>(cut)});
      skip();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      expect('}');
      return make(std::move(es));
    }
  };
  NameId n = rec(rec);
  skip();
  if (pos != text.size()) throw ParseError(pos, "trailing input");
  return n;
}

// ---------------------------------------------------------------- universes

std::uint64_t universe_size(std::size_t algebra_size, int rank_bound) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t s = 1;
  for (int r = 1; r <= rank_bound; ++r) {
    std::uint64_t next = 1;
    for (std::uint64_t i = 0; i < s; ++i) {
      if (next > kMax / algebra_size) return kMax;
      next *= algebra_size;
    }
    s = next;
  }
  return s;
}

NameUniverse name_universe(std::shared_ptr<NameStore> store, int rank_bound, std::uint64_t cap) {
  if (rank_bound < 0) throw std::invalid_argument("negative rank bound");
  const std::size_t a = store->algebra().size();
  const std::uint64_t total = universe_size(a, rank_bound);
  if (total > cap) {
    throw CapExceeded("rank-" + std::to_string(rank_bound) + " universe over a " + std::to_string(a) +
                      "-element algebra has " +
                      (total == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                         : std::to_string(total)) +
                      " names; cap is " + std::to_string(cap));
  }
  std::vector<NameId> level{store->empty_name()};
  for (int r = 1; r <= rank_bound; ++r) {
    std::vector<NameId> next;
    std::vector<BoolAlgebra::Elem> digits(level.size(), 0);
    for (;;) {
      std::vector<NameEntry> es;
      for (std::size_t i = 0; i < level.size(); ++i) {
        if (digits[i]) es.push_back(NameEntry{level[i], digits[i]});
      }
      next.push_back(store->make(std::move(es)));
      std::size_t i = 0;
      while (i < digits.size() && digits[i] == store->algebra().one()) digits[i++] = 0;
      if (i == digits.size()) break;
      ++digits[i];
    }
    level = std::move(next);
  }
  std::stable_sort(level.begin(), level.end(), [&](NameId x, NameId y) { return store->rank(x) < store->rank(y); });
  return NameUniverse{std::move(store), rank_bound, std::move(level)};
}

// ---------------------------------------------------------------- truth values

TruthSession::TruthSession(std::shared_ptr<NameStore> store) : store_(std::move(store)) {}

namespace {

std::uint64_t pair_key(NameId x, NameId y) { return std::uint64_t{x} << 32 | y; }

}  // namespace

BoolAlgebra::Elem TruthSession::member(NameId x, NameId y) {
  auto it = mem_.find(pair_key(x, y));
  if (it != mem_.end()) return it->second;
  const BoolAlgebra& A = algebra();
  BoolAlgebra::Elem v = A.zero();
  for (const NameEntry& t : store_->entries(y)) {
    v = A.join(v, A.meet(equal(t.child, x), t.cut));
  }
  mem_.emplace(pair_key(x, y), v);
  return v;
}

BoolAlgebra::Elem TruthSession::equal(NameId x, NameId y) {
  auto it = eq_.find(pair_key(x, y));
  if (it != eq_.end()) return it->second;
  const BoolAlgebra& A = algebra();
  BoolAlgebra::Elem v = A.one();
  for (const NameEntry& t : store_->entries(x)) {
    v = A.meet(v, A.join(A.complement(t.cut), member(t.child, y)));
  }
  for (const NameEntry& t : store_->entries(y)) {
    v = A.meet(v, A.join(A.complement(t.cut), member(t.child, x)));
  }
  eq_.emplace(pair_key(x, y), v);
  return v;
}

BoolAlgebra::Elem TruthSession::value(const Formula& f, std::span<const NameId> constants,
                                      std::span<const NameId> range) {
  std::vector<std::pair<std::string, NameId>> env;
  return eval(f, constants, range, env);
}

BoolAlgebra::Elem TruthSession::eval(const Formula& f, std::span<const NameId> constants,
                                     std::span<const NameId> range,
                                     std::vector<std::pair<std::string, NameId>>& env) {
  const BoolAlgebra& A = algebra();
  auto term = [&](const Term& t) -> NameId {
    if (t.is_var()) {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == t.var) return it->second;
      }
      throw FormulaError("open formula: free variable '" + t.var + "'");
    }
    if (t.index < 0 || static_cast<std::size_t>(t.index) >= constants.size()) {
      throw FormulaError("constant $" + std::to_string(t.index) + " outside the universe");
    }
    return constants[t.index];
  };
  switch (f->op) {
    case Op::Member:
      return member(term(f->lhs), term(f->rhs));
    case Op::Equal:
      return equal(term(f->lhs), term(f->rhs));
    case Op::Not:
      return A.complement(eval(f->a, constants, range, env));
    case Op::And:
      return A.meet(eval(f->a, constants, range, env), eval(f->b, constants, range, env));
    case Op::Or:
      return A.join(eval(f->a, constants, range, env), eval(f->b, constants, range, env));
    case Op::Implies:
      return A.join(A.complement(eval(f->a, constants, range, env)), eval(f->b, constants, range, env));
    case Op::Exists: {
      BoolAlgebra::Elem v = A.zero();
      for (NameId n : range) {
        env.emplace_back(f->var, n);
        v = A.join(v, eval(f->a, constants, range, env));
        env.pop_back();
        if (v == A.one()) break;
      }
      return v;
    }
  }
  return A.zero();
}

// ---------------------------------------------------------------- evaluation

Evaluator::Evaluator(const NameStore& store, Filter G) : store_(store), G_(std::move(G)) {
  if (G_.owner != store_.algebra().owner()) throw std::invalid_argument("filter on a different poset");
}

const HFSet& Evaluator::operator()(NameId n) {
  auto it = memo_.find(n);
  if (it != memo_.end()) return it->second;
  std::vector<HFSet> ms;
  for (const NameEntry& e : store_.entries(n)) {
    if ((store_.algebra().members(e.cut) & G_.members).any()) ms.push_back((*this)(e.child));
  }
  return memo_.emplace(n, HFSet(std::move(ms))).first->second;
}

HFSet evaluate(const NameStore& store, NameId n, const Filter& G) {
  Evaluator ev(store, G);
  return ev(n);
}

}  // namespace forcinglab
