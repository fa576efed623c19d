#include "forcinglab/iteration.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "forcinglab/generic.hpp"

namespace forcinglab {

StepProvider constant_provider(std::size_t stages, std::optional<PosetPtr> q) {
  return StepProvider{stages, [q](std::size_t, const Branch&) { return q; }};
}

StepProvider shifted_provider(const StepProvider& base, std::size_t alpha, const Branch& g) {
  if (alpha > base.stages) throw std::invalid_argument("shift beyond the last stage");
  if (g.size() != alpha) throw std::invalid_argument("branch length must equal the shift");
  auto rule = base.rule;
  return StepProvider{base.stages - alpha, [rule, alpha, g](std::size_t n, const Branch& b) {
                        Branch full = g;
                        full.insert(full.end(), b.begin(), b.end());
                        return rule(alpha + n, full);
                      }};
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

}  // namespace

StepProvider parse_provider_table(std::string_view text) {
  std::map<std::string, PosetPtr> defs;
  // stage -> branch text -> poset or undefined
  std::map<std::size_t, std::map<std::string, std::optional<PosetPtr>>> table;
  std::optional<std::size_t> stage;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("provider table line " + std::to_string(lineno) + ": " + what);
  };
  auto resolve = [&](const std::string& ref) -> std::optional<PosetPtr> {
    if (ref == "undef") return std::nullopt;
    if (ref == "point") return std::make_shared<const Poset>(Poset::point());
    if (auto it = defs.find(ref); it != defs.end()) return it->second;
    if (ref.size() > 1 && ref[0] == 'A' && std::all_of(ref.begin() + 1, ref.end(), ::isdigit)) {
      return std::make_shared<const Poset>(Poset::antichain(std::stoul(ref.substr(1))));
    }
    fail("unknown poset '" + ref + "'");
    return std::nullopt;
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.rfind("define ", 0) == 0) {
      auto eq = line.find('=');
      if (eq == std::string::npos) fail("expected '='");
      std::string name = trim(line.substr(7, eq - 7));
      std::string body = line.substr(eq + 1);
      std::replace(body.begin(), body.end(), ';', '\n');
      try {
        defs[name] = std::make_shared<const Poset>(parse_poset(body));
      } catch (const PosetError& e) {
        fail(e.what());
      }
    } else if (line.rfind("stage ", 0) == 0) {
      try {
        stage = std::stoul(line.substr(6));
      } catch (const std::exception&) {
        fail("bad stage index");
      }
    } else if (line.rfind("G:", 0) == 0) {
      if (!stage) fail("entry before any stage header");
      auto arrow = line.find("->");
      if (arrow == std::string::npos) fail("expected '->'");
      std::string branch = trim(line.substr(2, arrow - 2));
      auto q = resolve(trim(line.substr(arrow + 2)));
      if (q && !is_separative(**q)) fail("poset is not separative");
      table[*stage][branch] = q;
    } else {
      fail("unrecognized line");
    }
  }
  std::size_t stages = table.empty() ? 0 : table.rbegin()->first + 1;
  for (std::size_t n = 0; n < stages; ++n) {
    if (!table.count(n)) throw std::invalid_argument("provider table has no entries for stage " + std::to_string(n));
  }
  return StepProvider{stages, [table](std::size_t n, const Branch& b) -> std::optional<PosetPtr> {
                        const auto& rows = table.at(n);
                        std::string key;
                        for (std::size_t i = 0; i < b.size(); ++i) key += (i ? "." : "") + std::to_string(b[i]);
                        if (auto it = rows.find(key); it != rows.end() && n > 0) return it->second;
                        if (auto it = rows.find("*"); it != rows.end()) return it->second;
                        throw IterationError("provider table has no entry for stage " + std::to_string(n) +
                                             " generic " + (key.empty() ? "*" : key));
                      }};
}

int IterationStage::find(const StageCondition& c) const {
  auto it = index.find(c);
  return it == index.end() ? -1 : it->second;
}

int IterationStage::atom_for_branch(const Branch& b) const {
  for (std::size_t i = 0; i < branches.size(); ++i) {
    if (branches[i] == b) return poset->atoms()[i];
  }
  return -1;
}

namespace {

// The one tail over prefix p of stage s.
std::vector<int> one_tail(const IterationStage& s, int p) {
  const Poset& P = *s.poset;
  std::vector<int> t(P.atoms().size(), kNotBelow);
  for_each_bit(P.atoms_below(p), [&](int a) {
    int i = P.atom_index(a);
    t[i] = s.step[i] ? (*s.step[i])->top() : kUndefined;
  });
  return t;
}

bool any_undefined_below(const IterationStage& s, int p) {
  bool any = false;
  for_each_bit(s.poset->atoms_below(p), [&](int a) { any = any || !s.step[s.poset->atom_index(a)]; });
  return any;
}

}  // namespace

int Iteration::restrict(std::size_t n, int p, std::size_t m) const {
  if (m > n) throw std::invalid_argument("restriction to a later stage");
  for (; n > m; --n) p = stages_.at(n).conditions.at(p).prefix;
  return p;
}

int Iteration::embed(std::size_t m, int p, std::size_t n) const {
  if (m > n) throw std::invalid_argument("embedding into an earlier stage");
  for (; m < n; ++m) {
    const IterationStage& s = stages_.at(m);
    p = stages_.at(m + 1).find(StageCondition{p, one_tail(s, p)});
  }
  return p;
}

bool Iteration::is_one_tail(std::size_t n, int p) const {
  if (n == 0) return true;
  const StageCondition& c = stages_.at(n).conditions.at(p);
  return c.tail == one_tail(stages_.at(n - 1), c.prefix);
}

std::string Iteration::describe(std::size_t n, int p) const {
  if (n == 0) return "()";
  const StageCondition& c = stages_.at(n).conditions.at(p);
  const IterationStage& prev = stages_.at(n - 1);
  std::string out = describe(n - 1, c.prefix) + "^(";
  if (is_one_tail(n, p)) return out + "1)";
  bool first = true;
  for (std::size_t i = 0; i < c.tail.size(); ++i) {
    if (c.tail[i] == kNotBelow) continue;
    out += first ? "" : ",";
    first = false;
    out += std::to_string(i) + ":" + (*prev.step[i])->label(c.tail[i]);
  }
  return out + ")";
}

std::uint64_t next_stage_size(const IterationStage& s, const std::vector<std::optional<PosetPtr>>& step) {
  const Poset& P = *s.poset;
  std::uint64_t total = 0;
  for (int p = 0; p < static_cast<int>(P.size()); ++p) {
    std::uint64_t prod = 1;
    bool undefined = false;
    for_each_bit(P.atoms_below(p), [&](int a) {
      const auto& q = step[P.atom_index(a)];
      if (!q) {
        undefined = true;
      } else if (prod <= (std::uint64_t{1} << 40)) {
        prod *= (*q)->size();
      }
    });
    total += undefined ? 1 : prod;
  }
  return total;
}

Iteration build_iteration(const StepProvider& provider, const IterationCaps& caps) {
  if (provider.stages > caps.max_stages) {
    throw CapExceeded("provider has " + std::to_string(provider.stages) + " stages, above the bound of " +
                      std::to_string(caps.max_stages));
  }
  if (!provider.rule && provider.stages > 0) throw std::invalid_argument("provider has no rule");
  Iteration it;
  it.provider_ = provider;
  IterationStage s0;
  s0.poset = std::make_shared<const Poset>(Poset::point());
  s0.branches = {Branch{}};
  it.stages_.push_back(std::move(s0));
  std::set<const Poset*> checked;

  for (std::size_t n = 0; n < provider.stages; ++n) {
    IterationStage& cur = it.stages_[n];
    const Poset& P = *cur.poset;
    const std::size_t k = P.atoms().size();
    cur.step.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      cur.step[i] = provider.rule(n, cur.branches[i]);
      if (cur.step[i]) {
        const Poset* q = cur.step[i]->get();
        if (!q) throw IterationError("provider returned a null poset");
        if (!checked.count(q)) {
          if (!is_separative(*q)) {
            throw IterationError("provider returned a non-separative poset at stage " + std::to_string(n));
          }
          checked.insert(q);
        }
      }
    }
    const std::uint64_t size = next_stage_size(cur, cur.step);
    if (size > caps.max_stage_size) {
      throw CapExceeded("stage " + std::to_string(n + 1) + " would have " + std::to_string(size) +
                        " conditions, above the bound of " + std::to_string(caps.max_stage_size));
    }

    IterationStage next;
    next.n = n + 1;
    std::vector<std::vector<int>> below(P.size());  // atom positions below p
    for (int p = 0; p < static_cast<int>(P.size()); ++p) {
      for_each_bit(P.atoms_below(p), [&](int a) { below[p].push_back(P.atom_index(a)); });
      if (any_undefined_below(cur, p)) {
        next.conditions.push_back(StageCondition{p, one_tail(cur, p)});
        continue;
      }
      // every tail over the atoms below p, mixed radix
      std::vector<int> digit(below[p].size(), 0);
      while (true) {
        StageCondition c{p, std::vector<int>(k, kNotBelow)};
        for (std::size_t j = 0; j < digit.size(); ++j) c.tail[below[p][j]] = digit[j];
        next.conditions.push_back(std::move(c));
        std::size_t j = 0;
        for (; j < digit.size(); ++j) {
          if (++digit[j] < static_cast<int>((*cur.step[below[p][j]])->size())) break;
          digit[j] = 0;
        }
        if (j == digit.size()) break;
      }
    }
    const int m = static_cast<int>(next.conditions.size());
    for (int e = 0; e < m; ++e) next.index.emplace(next.conditions[e], e);

    std::vector<std::pair<int, int>> less;
    for (int x = 0; x < m; ++x) {
      const StageCondition& c = next.conditions[x];
      for (int y = 0; y < m; ++y) {
        const StageCondition& d = next.conditions[y];
        if (x == y || !P.leq(c.prefix, d.prefix)) continue;
        bool ok = true;
        for (int i : below[c.prefix]) {
          if (c.tail[i] == kUndefined) continue;
          if (d.tail[i] == kUndefined || !(*cur.step[i])->leq(c.tail[i], d.tail[i])) {
            ok = false;
            break;
          }
        }
        if (ok) less.emplace_back(x, y);
      }
    }
    const int top = next.find(StageCondition{P.top(), one_tail(cur, P.top())});
    next.poset = std::make_shared<const Poset>(Poset::from_relation(m, less, top));

    for (int a : next.poset->atoms()) {
      const StageCondition& c = next.conditions[a];
      int i = P.atom_index(c.prefix);
      if (i < 0) throw std::logic_error("minimal condition over a non-minimal prefix");
      Branch b = cur.branches[i];
      if (c.tail[i] == kUndefined) {
        b.push_back(0);
      } else {
        int x = (*cur.step[i])->atom_index(c.tail[i]);
        if (x < 0) throw std::logic_error("minimal condition with a non-minimal tail");
        b.push_back(x);
      }
      next.branches.push_back(std::move(b));
    }
    it.stages_.push_back(std::move(next));
  }
  return it;
}

CanonicalCondition canonicalize_condition(const Iteration& it, const std::vector<RawCoordinate>& coords) {
  if (coords.size() > it.stage_count()) throw IterationError("condition longer than the iteration");
  int p = 0;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const IterationStage& s = it.stage(k);
    const Poset& P = *s.poset;
    std::vector<int> tail = one_tail(s, p);
    if (const auto* nt = std::get_if<NameTail>(&coords[k])) {
      if (!nt->store || nt->store->algebra().owner() != P.id()) {
        throw IterationError("tail name at stage " + std::to_string(k) + " is not over the stage algebra");
      }
      for_each_bit(P.atoms_below(p), [&](int a) {
        int i = P.atom_index(a);
        int j = evaluate(*nt->store, nt->name, principal_filter(P, a)).as_ordinal();
        if (!s.step[i]) {
          // Q undefined: the name must be the trivial one
          if (j != 0) throw IterationError("tail name where Q is undefined is not 1");
          return;
        }
        if (j < 0 || j >= static_cast<int>((*s.step[i])->size())) {
          throw IterationError("tail name at stage " + std::to_string(k) + " is not forced into Q");
        }
        tail[i] = j;
      });
      if (any_undefined_below(s, p) && tail != one_tail(s, p)) {
        throw IterationError("prefix does not force Q to be defined");
      }
    }
    p = it.stage(k + 1).find(StageCondition{p, tail});
    if (p < 0) throw std::logic_error("canonical condition missing from its stage");
  }
  std::size_t len = coords.size();
  while (len > 0 && it.is_one_tail(len, it.restrict(coords.size(), p, len))) --len;
  return CanonicalCondition{len, it.restrict(coords.size(), p, len)};
}

bool SeparativityReport::ok() const {
  return std::all_of(stages.begin(), stages.end(), [](const SeparativityStage& s) { return s.separative; });
}

SeparativityReport check_stages_separative(const std::vector<PosetPtr>& stage_posets) {
  SeparativityReport r;
  for (std::size_t n = 0; n < stage_posets.size(); ++n) {
    auto w = separativity_witness(*stage_posets[n]);
    r.stages.push_back(SeparativityStage{n, stage_posets[n]->size(), !w.has_value(), w});
  }
  return r;
}

SeparativityReport check_stages_separative(const Iteration& it) {
  std::vector<PosetPtr> ps;
  for (std::size_t n = 0; n <= it.stage_count(); ++n) ps.push_back(it.stage(n).poset);
  return check_stages_separative(ps);
}

// ---------------------------------------------------------------- collapses

std::uint64_t collapse_count(std::size_t x, int m) {
  if (m < 1) throw std::invalid_argument("collapse target must be at least 1");
  std::uint64_t total = 0;
  for (std::size_t k = 0; k < static_cast<std::size_t>(m) && k <= x; ++k) {
    std::uint64_t c = 1;  // C(x, k) * m * (m-1) * ... * (m-k+1)
    for (std::size_t i = 0; i < k; ++i) c = c * (x - i) / (i + 1);
    for (std::size_t i = 0; i < k; ++i) c *= static_cast<std::uint64_t>(m) - i;
    total += c;
  }
  return total;
}

Collapse collapse_poset(std::size_t x, int m) {
  const std::uint64_t count = collapse_count(x, m);
  if (count > kMaxElements) {
    throw CapExceeded("Col(" + std::to_string(x) + ", " + std::to_string(m) + ") has " + std::to_string(count) +
                      " conditions");
  }
  Collapse c;
  std::vector<int> cur(x, -1);
  std::vector<bool> used(m, false);
  auto rec = [&](auto&& self, std::size_t i, int size) -> void {
    if (i == x) {
      c.maps.push_back(cur);
      return;
    }
    self(self, i + 1, size);
    if (size + 1 >= m) return;
    for (int v = 0; v < m; ++v) {
      if (used[v]) continue;
      used[v] = true;
      cur[i] = v;
      self(self, i + 1, size + 1);
      cur[i] = -1;
      used[v] = false;
    }
  };
  rec(rec, 0, 0);
  auto size_of = [](const std::vector<int>& f) { return std::count_if(f.begin(), f.end(), [](int v) { return v >= 0; }); };
  std::stable_sort(c.maps.begin(), c.maps.end(), [&](const auto& a, const auto& b) {
    auto sa = size_of(a), sb = size_of(b);
    return sa != sb ? sa < sb : a < b;
  });
  const int n = static_cast<int>(c.maps.size());
  std::vector<std::pair<int, int>> less;
  std::vector<std::string> labels;
  for (int e = 0; e < n; ++e) {
    std::string l = "{";
    for (std::size_t i = 0; i < x; ++i) {
      if (c.maps[e][i] < 0) continue;
      l += (l.size() > 1 ? "," : "") + std::to_string(i) + ":" + std::to_string(c.maps[e][i]);
    }
    labels.push_back(l + "}");
    for (int f = 0; f < n; ++f) {
      if (e == f) continue;
      bool extends = true;
      for (std::size_t i = 0; i < x && extends; ++i) {
        if (c.maps[f][i] >= 0 && c.maps[e][i] != c.maps[f][i]) extends = false;
      }
      if (extends) less.emplace_back(e, f);
    }
  }
  c.poset = std::make_shared<const Poset>(Poset::from_relation(n, less, 0, std::move(labels)));
  return c;
}

PosetPtr product_poset(const std::vector<PosetPtr>& parts, std::vector<std::vector<int>>* coords,
                       std::size_t max_size) {
  std::uint64_t n = 1;
  for (const auto& q : parts) {
    n *= q->size();
    if (n > max_size) throw CapExceeded("product poset exceeds " + std::to_string(max_size) + " elements");
  }
  std::vector<std::vector<int>> tuples;
  std::vector<int> t(parts.size(), 0);
  for (std::uint64_t e = 0; e < n; ++e) {
    tuples.push_back(t);
    for (std::size_t j = parts.size(); j-- > 0;) {
      if (++t[j] < static_cast<int>(parts[j]->size())) break;
      t[j] = 0;
    }
  }
  std::vector<std::pair<int, int>> less;
  std::vector<std::string> labels;
  int top = -1;
  for (std::size_t a = 0; a < n; ++a) {
    std::string l = "(";
    bool is_top = true;
    for (std::size_t j = 0; j < parts.size(); ++j) {
      l += (j ? "," : "") + parts[j]->label(tuples[a][j]);
      is_top = is_top && tuples[a][j] == parts[j]->top();
    }
    labels.push_back(l + ")");
    if (is_top) top = static_cast<int>(a);
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      bool le = true;
      for (std::size_t j = 0; j < parts.size() && le; ++j) le = parts[j]->leq(tuples[a][j], tuples[b][j]);
      if (le) less.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  auto P = std::make_shared<const Poset>(Poset::from_relation(n, less, top, std::move(labels)));
  if (coords) *coords = std::move(tuples);
  return P;
}

// ---------------------------------------------------------------- toy CIFS

CifsToy::CifsToy(std::vector<Formula> formulas, std::vector<LadderStep> ladder, std::size_t max_product)
    : formulas_(std::move(formulas)), ladder_(std::move(ladder)), max_product_(max_product) {
  for (const auto& f : formulas_) {
    auto fv = free_variables(f);
    if (fv.size() != 1) {
      throw FormulaError("formula '" + to_string(f) + "' has " + std::to_string(fv.size()) +
                         " free variables, expected 1");
    }
    vars_.push_back(*fv.begin());
  }
  if (ladder_.empty()) throw std::invalid_argument("empty ladder");
  for (std::size_t k = 0; k < ladder_.size(); ++k) {
    if (ladder_[k].m < 1 || ladder_[k].rank < 0) throw std::invalid_argument("ladder entries need rank >= 0, m >= 1");
    if (k > 0 && ladder_[k].m <= ladder_[k - 1].m) throw std::invalid_argument("ladder m must strictly increase");
  }
}

const CifsStepInfo& CifsToy::info(std::size_t k, const Branch& b) const {
  if (k >= ladder_.size()) throw std::out_of_range("stage beyond the ladder");
  if (b.size() != k) throw std::invalid_argument("branch length must equal the stage");
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find({k, b}); it != memo_.end()) return *it->second;
  }
  auto out = std::make_shared<CifsStepInfo>();
  const LadderStep& step = ladder_[k];
  std::vector<HFSet> R = rank_segment(step.rank);
  if (k > 0) {
    const CifsStepInfo& prev = info(k - 1, Branch(b.begin(), b.end() - 1));
    int atom = prev.product->atoms().at(b.back());
    const auto& injection = prev.components[0].col.maps[prev.coords[atom][0]];
    for (int v : injection) {
      if (v < 0) continue;
      HFSet o = HFSet::ordinal(v);
      R.push_back(o);
      for (auto& y : transitive_closure(o)) R.push_back(y);
    }
    std::sort(R.begin(), R.end());
    R.erase(std::unique(R.begin(), R.end()), R.end());
  }
  out->R = R;

  CifsComponent c0;
  c0.collapse = true;
  c0.domain = R;
  c0.m = step.m;
  c0.col = collapse_poset(R.size(), step.m);
  out->components.push_back(std::move(c0));

  FiniteStructure S{R.size(), std::vector<std::vector<bool>>(R.size(), std::vector<bool>(R.size()))};
  for (std::size_t x = 0; x < R.size(); ++x) {
    for (std::size_t y = 0; y < R.size(); ++y) S.in[x][y] = R[y].contains(R[x]);
  }
  for (std::size_t i = 0; i < formulas_.size(); ++i) {
    CifsComponent c;
    c.m = step.m;
    auto w = witnesses(formulas_[i], vars_[i], S);
    if (w.size() == 1) {
      c.collapse = true;
      c.witness = R[w[0]];
      c.domain = c.witness->members();
      c.col = collapse_poset(c.domain.size(), step.m);
    } else {
      c.col = collapse_poset(0, 1);
    }
    out->components.push_back(std::move(c));
  }
  std::vector<PosetPtr> parts;
  for (const auto& c : out->components) parts.push_back(c.col.poset);
  out->product = product_poset(parts, &out->coords, max_product_);

  std::lock_guard lock(mu_);
  auto [it, inserted] = memo_.emplace(std::make_pair(k, b), std::move(out));
  return *it->second;
}

StepProvider CifsToy::provider() const {
  auto self = shared_from_this();
  return StepProvider{ladder_.size(),
                      [self](std::size_t n, const Branch& b) -> std::optional<PosetPtr> { return self->info(n, b).product; }};
}

std::shared_ptr<CifsToy> cifs_toy_iteration(std::vector<Formula> formulas, std::vector<LadderStep> ladder,
                                            std::size_t max_stages) {
  if (ladder.size() > max_stages) {
    throw std::invalid_argument("ladder has " + std::to_string(ladder.size()) + " stages, above the bound of " +
                                std::to_string(max_stages));
  }
  return std::make_shared<CifsToy>(std::move(formulas), std::move(ladder));
}

}  // namespace forcinglab
