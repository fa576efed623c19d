#include "forcinglab/projection.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "forcinglab/filter.hpp"
#include "forcinglab/generic.hpp"

namespace forcinglab {

namespace {

constexpr std::size_t kAlgebraAtoms = 20;
constexpr std::size_t kPrimeTable = std::size_t{1} << 16;
constexpr std::size_t kExamples = 6;

std::string bits_str(const Bits& b) {
  std::string s = "{";
  for_each_bit(b, [&](int i) { s += (s.size() > 1 ? "," : "") + std::to_string(i); });
  return s + "}";
}

std::shared_ptr<const BoolAlgebra> try_algebra(const PosetPtr& P) {
  try {
    return std::make_shared<const BoolAlgebra>(P, kAlgebraAtoms);
  } catch (const CapExceeded&) {
    return nullptr;
  }
}

Bits up_closure(const Poset& P, const Bits& s) {
  Bits out;
  for_each_bit(s, [&](int p) { out |= P.up(p); });
  return out;
}

}  // namespace

int QuotientStage::find(const StageCondition& c) const {
  auto it = index.find(c);
  return it == index.end() ? -1 : it->second;
}

ProjectionContext::ProjectionContext(std::shared_ptr<const Iteration> it, std::size_t alpha, int g, PrimeMode mode)
    : it_(std::move(it)), alpha_(alpha), g_(g), mode_(mode) {
  if (!it_) throw std::invalid_argument("null iteration");
  if (alpha_ > it_->stage_count()) throw std::invalid_argument("alpha beyond the last stage");
  const Poset& Pa = it_->poset(alpha_);
  if (g_ < 0 || g_ >= static_cast<int>(Pa.size()) || Pa.atom_index(g_) < 0) {
    throw std::invalid_argument("G is not generic: it is not the upward closure of a minimal element");
  }
  branch_ = it_->stage(alpha_).branches[Pa.atom_index(g_)];

  QuotientStage q0;
  q0.poset = std::make_shared<const Poset>(Poset::point());
  q0.full_atom = {g_};
  q0.pi.assign(Pa.size(), -1);
  for_each_bit(Pa.up(g_), [&](int p) { q0.pi[p] = 0; });
  stages_.push_back(std::move(q0));

  for (std::size_t j = 0; alpha_ + j < it_->stage_count(); ++j) {
    const std::size_t gamma = alpha_ + j;
    const QuotientStage& cur = stages_[j];
    const IterationStage& Sg = it_->stage(gamma);
    const IterationStage& Sb = it_->stage(gamma + 1);
    const Poset& Pg = *Sg.poset;
    const Poset& Pb = *Sb.poset;
    const Poset& Qj = *cur.poset;
    const std::size_t qa = Qj.atoms().size();

    QuotientStage next;
    next.pi.assign(Pb.size(), -1);
    for (int d = 0; d < static_cast<int>(Pb.size()); ++d) {
      const StageCondition& dc = Sb.conditions[d];
      const int x = cur.pi[dc.prefix];
      if (x < 0) continue;
      // pi''(tail) evaluated through each generic of the quotient below x
      StageCondition key{x, std::vector<int>(qa, kNotBelow)};
      for_each_bit(Qj.atoms_below(x), [&](int H) {
        const int i = Qj.atom_index(H);
        const int v = dc.tail[Pg.atom_index(cur.full_atom[i])];
        if (v == kNotBelow) throw std::logic_error("quotient generic outside the projected prefix");
        key.tail[i] = v;
      });
      auto [pos, inserted] = next.index.emplace(key, static_cast<int>(next.conditions.size()));
      if (inserted) next.conditions.push_back(key);
      next.pi[d] = pos->second;
    }
    const int m = static_cast<int>(next.conditions.size());
    std::vector<std::pair<int, int>> less;
    if (j == 0) {
      // first quotient stage: the image of the order of P_{alpha+1}
      std::set<std::pair<int, int>> pairs;
      for (int d = 0; d < static_cast<int>(Pb.size()); ++d) {
        if (next.pi[d] < 0) continue;
        for_each_bit(Pb.up(d), [&](int e) {
          if (next.pi[e] >= 0 && next.pi[d] != next.pi[e]) pairs.emplace(next.pi[d], next.pi[e]);
        });
      }
      less.assign(pairs.begin(), pairs.end());
    } else {
      // later stages: prefix below and the prefix forces the tails in order
      auto step_of = [&](int i) { return Sg.step[Pg.atom_index(cur.full_atom[i])]; };
      for (int x = 0; x < m; ++x) {
        const StageCondition& c = next.conditions[x];
        for (int y = 0; y < m; ++y) {
          const StageCondition& d = next.conditions[y];
          if (x == y || !Qj.leq(c.prefix, d.prefix)) continue;
          bool ok = true;
          for_each_bit(Qj.atoms_below(c.prefix), [&](int H) {
            const int i = Qj.atom_index(H);
            if (!ok || c.tail[i] == kUndefined) return;
            const auto& Q = step_of(i);
            ok = d.tail[i] != kUndefined && Q && (*Q)->leq(c.tail[i], d.tail[i]);
          });
          if (ok) less.emplace_back(x, y);
        }
      }
    }
    try {
      next.poset = std::make_shared<const Poset>(Poset::from_relation(m, less, next.pi[Pb.top()]));
    } catch (const PosetError& e) {
      throw std::logic_error(std::string("quotient stage is not a poset: ") + e.what());
    }
    for (int y : next.poset->atoms()) {
      const StageCondition& c = next.conditions[y];
      const int i = Qj.atom_index(c.prefix);
      if (i < 0) throw std::logic_error("minimal quotient condition over a non-minimal prefix");
      const int A = cur.full_atom[i];
      StageCondition full{A, std::vector<int>(Pg.atoms().size(), kNotBelow)};
      full.tail[Pg.atom_index(A)] = c.tail[i];
      const int a = Sb.find(full);
      if (a < 0 || Pb.atom_index(a) < 0) throw std::logic_error("quotient atom without a full counterpart");
      next.full_atom.push_back(a);
    }
    stages_.push_back(std::move(next));
  }

  for (std::size_t j = 0; j < stages_.size(); ++j) {
    QuotientStage& q = stages_[j];
    q.source = try_algebra(it_->stage(alpha_ + j).poset);
    q.target = try_algebra(q.poset);
    if (mode_ == PrimeMode::Regularized && q.source && q.target && q.source->size() <= kPrimeTable) {
      q.prime.resize(q.source->size());
      for (BoolAlgebra::Elem u = 0; u < q.source->size(); ++u) {
        q.prime[u] = q.target->index_of(prime_bits(j, q.source->members(u)));
      }
    }
  }
}

Bits ProjectionContext::image(std::size_t j, const Bits& s) const {
  const QuotientStage& q = stages_.at(j);
  Bits out;
  for_each_bit(s, [&](int d) {
    if (q.pi[d] >= 0) out.set(q.pi[d]);
  });
  return out;
}

Bits ProjectionContext::prime_bits(std::size_t j, const Bits& members) const {
  const Poset& Q = *stages_.at(j).poset;
  Bits img = image(j, members);
  switch (mode_) {
    case PrimeMode::Regularized:
      return regularize(Q, img).members();
    case PrimeMode::ImageOnly:
      return downward_closure(Q, img);
    case PrimeMode::UpwardImage:
      return regularize(Q, up_closure(Q, img)).members();
  }
  return img;
}

BoolAlgebra::Elem ProjectionContext::prime(std::size_t j, BoolAlgebra::Elem u) const {
  const QuotientStage& q = stages_.at(j);
  if (!q.prime.empty()) return q.prime.at(u);
  if (!q.source || !q.target) throw CapExceeded("regular-open algebra beyond the atom bound");
  return q.target->index_of(prime_bits(j, q.source->members(u)));
}

BoolAlgebra::Elem ProjectionContext::preimage_cut(std::size_t j, BoolAlgebra::Elem c) const {
  const QuotientStage& q = stages_.at(j);
  if (!q.source || !q.target) throw CapExceeded("regular-open algebra beyond the atom bound");
  const Bits cm = q.target->members(c);
  const std::size_t beta = alpha_ + j;
  const Poset& Pb = it_->poset(beta);
  Bits out;
  for (int d = 0; d < static_cast<int>(Pb.size()); ++d) {
    if (q.pi[d] >= 0 && cm.test(q.pi[d]) && it_->restrict(beta, d, alpha_) == g_) out.set(d);
  }
  return q.source->index_of(out);
}

std::vector<ProjectionContext> sibling_contexts(std::shared_ptr<const Iteration> it, std::size_t alpha,
                                                PrimeMode mode) {
  std::vector<ProjectionContext> out;
  for (int a : it->poset(alpha).atoms()) out.emplace_back(it, alpha, a, mode);
  return out;
}

int concat(const Iteration& it, std::size_t alpha, int s, std::size_t beta, int d) {
  if (alpha > beta || beta > it.stage_count()) throw std::invalid_argument("bad stage range");
  std::vector<int> chain(beta + 1, -1);
  chain[beta] = d;
  for (std::size_t k = beta; k > alpha; --k) chain[k - 1] = it.stage(k).conditions.at(chain[k]).prefix;
  int c = s;
  for (std::size_t k = alpha; k < beta; ++k) {
    const IterationStage& st = it.stage(k);
    const Poset& P = *st.poset;
    const StageCondition& dc = it.stage(k + 1).conditions[chain[k + 1]];
    StageCondition next{c, std::vector<int>(P.atoms().size(), kNotBelow)};
    for_each_bit(P.atoms_below(c), [&](int A) {
      const int i = P.atom_index(A);
      if (dc.tail[i] != kNotBelow) {
        next.tail[i] = dc.tail[i];
      } else {
        next.tail[i] = st.step[i] ? (*st.step[i])->top() : kUndefined;
      }
    });
    c = it.stage(k + 1).find(next);
    if (c < 0) return -1;
  }
  return c;
}

Bits merge_set(const Iteration& it, std::size_t alpha, std::size_t beta, int d1, int d2, bool below_prefix) {
  const Poset& Pa = it.poset(alpha);
  const int p = it.restrict(beta, d1, alpha);
  if (p != it.restrict(beta, d2, alpha)) throw std::invalid_argument("conditions with different prefixes");
  Bits U;
  for_each_bit(below_prefix ? Pa.down(p) : Pa.all(), [&](int s) {
    const int e1 = concat(it, alpha, s, beta, d1);
    if (e1 >= 0 && e1 == concat(it, alpha, s, beta, d2)) U.set(s);
  });
  return U;
}

NameProjector::NameProjector(const ProjectionContext& ctx, std::size_t j, std::shared_ptr<NameStore> source,
                             std::shared_ptr<NameStore> target)
    : ctx_(ctx), j_(j), source_(std::move(source)), target_(std::move(target)) {
  const QuotientStage& q = ctx_.quotient(j_);
  if (!q.source || !q.target) throw CapExceeded("regular-open algebra beyond the atom bound");
  if (source_->algebra().owner() != q.source->owner() || target_->algebra().owner() != q.target->owner()) {
    throw std::invalid_argument("name stores are not over the stage algebras");
  }
}

NameId NameProjector::operator()(NameId x) {
  if (auto it = fwd_.find(x); it != fwd_.end()) return it->second;
  std::vector<NameEntry> out;
  for (const NameEntry& e : source_->entries(x)) out.push_back({(*this)(e.child), ctx_.prime(j_, e.cut)});
  NameId y = target_->make(std::move(out));
  fwd_.emplace(x, y);
  return y;
}

NameId NameProjector::preimage(NameId y) {
  if (auto it = back_.find(y); it != back_.end()) return it->second;
  std::vector<NameEntry> out;
  for (const NameEntry& e : target_->entries(y)) out.push_back({preimage(e.child), ctx_.preimage_cut(j_, e.cut)});
  NameId x = source_->make(std::move(out));
  back_.emplace(y, x);
  return x;
}

// ------------------------------------------------------------------ reports

void CheckOutcome::fail(Counterexample c) {
  ++failures;
  if (examples.size() < kExamples) examples.push_back(std::move(c));
}

CheckOutcome& SuiteReport::add(std::string check) {
  checks.push_back(CheckOutcome{});
  checks.back().check = std::move(check);
  return checks.back();
}

bool SuiteReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.ok(); });
}

std::size_t SuiteReport::failures() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.failures;
  return n;
}

const CheckOutcome* SuiteReport::find(const std::string& check) const {
  for (const auto& c : checks) {
    if (c.check == check) return &c;
  }
  return nullptr;
}

// ---------------------------------------------------------------- universes

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
  return a;
}

std::uint64_t context_salt(const ProjectionContext& ctx, std::size_t j) {
  return mix(mix(ctx.alpha(), static_cast<std::uint64_t>(ctx.generic_atom())), j);
}

// Names with one to three entries drawn from base, each with a nonzero cut.
void sample_names(NameStore& store, const std::vector<NameId>& base, std::size_t count, std::mt19937_64& rng,
                  std::vector<NameId>& out) {
  const std::uint64_t cuts = store.algebra().size();
  if (base.empty() || cuts < 2) return;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<NameEntry> entries;
    const std::size_t n = 1 + rng() % 3;
    for (std::size_t e = 0; e < n; ++e) {
      entries.push_back({base[rng() % base.size()], static_cast<BoolAlgebra::Elem>(1 + rng() % (cuts - 1))});
    }
    out.push_back(store.make(std::move(entries)));
  }
}

std::vector<NameId> largest_universe(const std::shared_ptr<NameStore>& store, const UniverseBounds& b, int& rank,
                                     bool& complete) {
  for (int r = b.max_rank; r >= 0; --r) {
    if (universe_size(store->algebra().size(), r) <= b.cap) {
      rank = r;
      complete = r == b.max_rank;
      return name_universe(store, r, b.cap).names;
    }
  }
  rank = 0;
  complete = false;
  return {store->empty_name()};
}

void dedupe(std::vector<NameId>& v) {
  std::set<NameId> seen;
  std::vector<NameId> out;
  for (NameId x : v) {
    if (seen.insert(x).second) out.push_back(x);
  }
  v = std::move(out);
}

}  // namespace

WorkingUniverse working_universe(NameProjector& proj, const UniverseBounds& b) {
  WorkingUniverse w;
  std::mt19937_64 rng(mix(b.seed, context_salt(proj.context(), proj.stage())));
  w.target = largest_universe(proj.target_ptr(), b, w.target_rank, w.target_complete);
  if (!w.target_complete) {
    std::vector<NameId> base = w.target;
    sample_names(proj.target(), base, b.sample, rng, w.target);
  }
  dedupe(w.target);

  w.source = largest_universe(proj.source_ptr(), b, w.source_rank, w.source_complete);
  for (NameId y : w.target) w.source.push_back(proj.preimage(y));
  for (const HFSet& x : rank_segment(3)) w.source.push_back(proj.source().check(x));
  if (!w.source_complete) {
    std::vector<NameId> base(w.source.begin(), w.source.end());
    sample_names(proj.source(), base, b.sample, rng, w.source);
  }
  dedupe(w.source);
  return w;
}

// ------------------------------------------------------------ cut and name maps

namespace {

struct Stores {
  std::shared_ptr<NameStore> source, target;
};

Stores stores_for(const ProjectionContext& ctx, std::size_t j) {
  const QuotientStage& q = ctx.quotient(j);
  if (!q.source || !q.target) throw CapExceeded("regular-open algebra beyond the atom bound");
  return {std::make_shared<NameStore>(q.source), std::make_shared<NameStore>(q.target)};
}

std::vector<std::pair<NameId, NameId>> name_pairs(const std::vector<NameId>& names, const UniverseBounds& b,
                                                  std::uint64_t salt, bool& all) {
  std::vector<std::pair<NameId, NameId>> out;
  const std::size_t n = names.size();
  all = n * n <= b.max_pairs;
  if (all) {
    for (NameId x : names) {
      for (NameId y : names) out.emplace_back(x, y);
    }
    return out;
  }
  std::mt19937_64 rng(mix(b.seed, salt));
  for (std::size_t k = 0; k < b.max_pairs; ++k) out.emplace_back(names[rng() % n], names[rng() % n]);
  return out;
}

void check_onto(NameProjector& proj, const WorkingUniverse& w, CheckOutcome& c) {
  c.exhaustive = w.target_complete;
  c.note = "target names of rank <= " + std::to_string(w.target_rank) + (w.target_complete ? "" : " plus a sample");
  for (NameId y : w.target) {
    ++c.cases;
    try {
      NameId x = proj.preimage(y);
      NameId back = proj(x);
      if (back != y) c.fail({proj.target().format(y), proj.target().format(y), proj.target().format(back)});
    } catch (const std::invalid_argument& e) {
      c.fail({proj.target().format(y), "a regular preimage", e.what()});
    }
  }
}

void check_atomic(const ProjectionContext& ctx, std::size_t j, NameProjector& proj, const WorkingUniverse& w,
                  const UniverseBounds& b, CheckOutcome& c) {
  bool all = false;
  auto pairs = name_pairs(w.source, b, mix(context_salt(ctx, j), 77), all);
  c.exhaustive = all && w.source_complete;
  c.note = std::to_string(w.source.size()) + " source names, " + (all ? "all pairs" : "sampled pairs");
  TruthSession ss(proj.source_ptr()), ts(proj.target_ptr());
  for (auto [x, y] : pairs) {
    NameId px = proj(x), py = proj(y);
    for (int kind = 0; kind < 2; ++kind) {
      ++c.cases;
      BoolAlgebra::Elem lhs = ctx.prime(j, kind == 0 ? ss.member(x, y) : ss.equal(x, y));
      BoolAlgebra::Elem rhs = kind == 0 ? ts.member(px, py) : ts.equal(px, py);
      if (lhs != rhs) {
        c.fail({std::string(kind == 0 ? "in" : "=") + " " + proj.source().format(x) + " " + proj.source().format(y),
                std::to_string(rhs), std::to_string(lhs)});
      }
    }
  }
}

const std::vector<std::string>& default_formulas() {
  static const std::vector<std::string> f = {
      "exists z (z in $0 & z in $1)",
      "forall z (z in $0 -> z in $1)",
      "!($0 = $1) | exists z (z in $0 & !(z in $1))",
      "exists z (z = $0 & forall w (w in z -> w in $1))",
  };
  return f;
}

}  // namespace

SuiteReport verify_projection_maps(const ProjectionContext& ctx, std::size_t j, const UniverseBounds& b,
                            std::span<const Formula> formulas) {
  SuiteReport r;
  r.suite = "theorem2";
  const QuotientStage& q = ctx.quotient(j);
  auto st = stores_for(ctx, j);
  NameProjector proj(ctx, j, st.source, st.target);

  {
    CheckOutcome& c = r.add("cut map is a complete homomorphism");
    std::vector<BoolAlgebra::Elem> table(q.source->size());
    try {
      for (BoolAlgebra::Elem u = 0; u < table.size(); ++u) table[u] = ctx.prime(j, u);
      HomReport h = check_complete_hom(table, *q.source, *q.target);
      c.cases = h.families_checked + 2 + table.size();
      c.exhaustive = true;
      c.note = h.exhaustive_families ? "every subfamily enumerated"
                                     : "all pairs, complements and bounds; in a finite algebra these determine every "
                                       "product and sum";
      for (const auto& x : h.counterexamples) {
        std::string fam;
        for (auto e : x.family) fam += (fam.empty() ? "" : ",") + std::to_string(e);
        c.fail({x.law + " of {" + fam + "}", std::to_string(x.expected), std::to_string(x.got)});
      }
      c.failures = h.violations;
    } catch (const std::invalid_argument& e) {
      c.fail({"pi' table", "regular cuts", e.what()});
    }
  }

  WorkingUniverse w = working_universe(proj, b);
  check_onto(proj, w, r.add("name map is onto"));
  check_atomic(ctx, j, proj, w, b, r.add("atomic values transported"));

  {
    CheckOutcome& c = r.add("formula values transported");
    c.exhaustive = false;
    std::vector<Formula> fs(formulas.begin(), formulas.end());
    if (fs.empty()) {
      for (const auto& s : default_formulas()) fs.push_back(parse_formula(s));
    }
    const std::size_t K = std::min<std::size_t>(w.source.size(), 8);
    const std::size_t R = std::min<std::size_t>(w.source.size(), 12);
    std::vector<NameId> src_range(w.source.begin(), w.source.begin() + R), tgt_range;
    for (NameId x : src_range) tgt_range.push_back(proj(x));
    c.note = "quantifiers over " + std::to_string(R) + " source names and their images";
    TruthSession ss(st.source), ts(st.target);
    for (const Formula& f : fs) {
      for (std::size_t a = 0; a < K; ++a) {
        for (std::size_t bb = 0; bb < K; ++bb) {
          NameId src[2] = {w.source[a], w.source[bb]};
          NameId tgt[2] = {proj(src[0]), proj(src[1])};
          ++c.cases;
          BoolAlgebra::Elem lhs = ctx.prime(j, ss.value(f, src, src_range));
          BoolAlgebra::Elem rhs = ts.value(f, tgt, tgt_range);
          if (lhs != rhs) {
            c.fail({to_string(f) + " at " + st.source->format(src[0]) + ", " + st.source->format(src[1]),
                    std::to_string(rhs), std::to_string(lhs)});
          }
        }
      }
    }
  }
  return r;
}

// -------------------------------------------------------- quotient properties

SuiteReport verify_projection_properties(const std::vector<ProjectionContext>& siblings, std::size_t index, std::size_t j,
                                     const UniverseBounds& b) {
  SuiteReport r;
  r.suite = "projection-lemmas";
  const ProjectionContext& ctx = siblings.at(index);
  const Iteration& it = ctx.iteration();
  const std::size_t alpha = ctx.alpha(), beta = alpha + j;
  const Poset& Pa = it.poset(alpha);
  const Poset& Pb = it.poset(beta);
  const QuotientStage& q = ctx.quotient(j);
  const Poset& Q = *q.poset;
  const int nb = static_cast<int>(Pb.size());
  auto sib = [&](int atom) -> const ProjectionContext& { return siblings.at(Pa.atom_index(atom)); };

  std::vector<Bits> principal_image(nb);
  for (int d = 0; d < nb; ++d) principal_image[d] = ctx.prime_bits(j, Pb.down(d));

  {
    CheckOutcome& c = r.add("quotient principal cuts are images");
    for (int y = 0; y < static_cast<int>(Q.size()); ++y) {
      ++c.cases;
      bool found = false;
      for (int d = 0; d < nb && !found; ++d) found = principal_image[d] == Q.down(y);
      if (!found) c.fail({"U_" + std::to_string(y), "pi'(U_d) for some d", "none"});
    }
  }
  {
    CheckOutcome& c = r.add("images of principal cuts are principal");
    for (int d = 0; d < nb; ++d) {
      if (q.pi[d] < 0) continue;
      ++c.cases;
      if (principal_image[d] != Q.down(q.pi[d])) {
        c.fail({"d=" + std::to_string(d), bits_str(Q.down(q.pi[d])), bits_str(principal_image[d])});
      }
    }
  }
  {
    CheckOutcome& c = r.add("disjointness preserved");
    for (int d = 0; d < nb; ++d) {
      for (int e = d + 1; e < nb; ++e) {
        if (q.pi[d] < 0 || q.pi[e] < 0 || Pb.compatible(d, e)) continue;
        ++c.cases;
        if (Q.compatible(q.pi[d], q.pi[e])) {
          c.fail({std::to_string(d) + "," + std::to_string(e), "incompatible images", "compatible"});
        }
      }
    }
  }
  if (q.source && q.target) {
    const BoolAlgebra& A = *q.source;
    const std::size_t n = A.size();
    std::vector<Bits> img(n);
    for (BoolAlgebra::Elem u = 0; u < n; ++u) img[u] = ctx.prime_bits(j, A.members(u));
    {
      CheckOutcome& c = r.add("complements preserved");
      for (BoolAlgebra::Elem u = 0; u < n; ++u) {
        ++c.cases;
        Bits expected = complement_cut(Q, img[u]).members();
        if (img[A.complement(u)] != expected) c.fail({"U=" + std::to_string(u), bits_str(expected), bits_str(img[A.complement(u)])});
      }
    }
    {
      CheckOutcome& c = r.add("products preserved");
      c.note = "all pairs and the whole algebra as a family; finite products are iterated binary ones";
      auto regular_meet = [&](const Bits& x, const Bits& y) { return x & y; };
      if (n * n > (std::size_t{1} << 20)) {
        c.exhaustive = false;
        c.note = "sampled pairs";
      }
      std::mt19937_64 rng(mix(b.seed, context_salt(ctx, j)));
      const std::size_t pairs = c.exhaustive ? n * n : (std::size_t{1} << 20);
      for (std::size_t k = 0; k < pairs; ++k) {
        BoolAlgebra::Elem u = c.exhaustive ? static_cast<BoolAlgebra::Elem>(k / n) : rng() % n;
        BoolAlgebra::Elem v = c.exhaustive ? static_cast<BoolAlgebra::Elem>(k % n) : rng() % n;
        ++c.cases;
        Bits expected = regular_meet(img[u], img[v]);
        if (img[A.meet(u, v)] != expected) {
          c.fail({std::to_string(u) + "*" + std::to_string(v), bits_str(expected), bits_str(img[A.meet(u, v)])});
        }
      }
      Bits all_meet = Q.all();
      for (std::size_t u = 0; u < n; ++u) all_meet &= img[u];
      ++c.cases;
      if (img[A.zero()] != all_meet) c.fail({"whole algebra", bits_str(all_meet), bits_str(img[A.zero()])});
    }
  } else {
    r.add("complements preserved").note = "skipped: algebra beyond the atom bound";
    r.add("products preserved").note = "skipped: algebra beyond the atom bound";
    r.checks[r.checks.size() - 1].exhaustive = r.checks[r.checks.size() - 2].exhaustive = false;
  }

  // name maps
  if (q.source && q.target) {
    auto st = stores_for(ctx, j);
    NameProjector proj(ctx, j, st.source, st.target);
    WorkingUniverse w = working_universe(proj, b);
    check_onto(proj, w, r.add("name map is onto"));
    check_atomic(ctx, j, proj, w, b, r.add("atomic values transported"));

    CheckOutcome& c = r.add("forcing transported");
    const bool all = w.source.size() * w.source.size() <= 4096;
    const std::size_t K = all ? w.source.size() : 8;
    c.exhaustive = all && w.source_complete;
    c.note = "atomic formulas over " + std::to_string(K) + " source names";
    TruthSession ss(st.source), ts(st.target);
    const BoolAlgebra& A = *q.source;
    const BoolAlgebra& B = *q.target;
    for (std::size_t a = 0; a < K; ++a) {
      for (std::size_t bb = 0; bb < K; ++bb) {
        NameId x = w.source[a], y = w.source[bb];
        NameId px = proj(x), py = proj(y);
        for (int kind = 0; kind < 2; ++kind) {
          const BoolAlgebra::Elem sv = kind == 0 ? ss.member(x, y) : ss.equal(x, y);
          const BoolAlgebra::Elem tv = kind == 0 ? ts.member(px, py) : ts.equal(px, py);
          for (int d = 0; d < nb; ++d) {
            if (q.pi[d] < 0) continue;
            ++c.cases;
            const bool src_forces = A.leq(A.principal(d), sv);
            const bool tgt_forces = B.leq(B.principal(q.pi[d]), tv);
            if (src_forces && !tgt_forces) {
              c.fail({"d=" + std::to_string(d) + (kind ? " =" : " in"), "pi(d) forces the image", "it does not"});
            }
            if (tgt_forces) {
              const int p = it.restrict(beta, d, alpha);
              bool found = false;
              for_each_bit(Pa.down(p) & Pa.up(ctx.generic_atom()), [&](int s) {
                if (found) return;
                const int e = concat(it, alpha, s, beta, d);
                found = e >= 0 && A.leq(A.principal(e), sv);
              });
              if (!found) c.fail({"d=" + std::to_string(d) + (kind ? " =" : " in"), "some s in G below the prefix", "none"});
            }
          }
        }
      }
    }
  }

  {
    CheckOutcome& c = r.add("projection is monotone");
    for (int d = 0; d < nb; ++d) {
      if (q.pi[d] < 0) continue;
      for_each_bit(Pb.up(d), [&](int e) {
        ++c.cases;
        if (!Q.leq(q.pi[d], q.pi[e])) {
          c.fail({std::to_string(d) + "<=" + std::to_string(e), "images ordered", "not ordered"});
        }
      });
    }
  }

  // conditions of P_beta grouped by their alpha-prefix
  std::vector<std::vector<int>> by_prefix(Pa.size());
  for (int d = 0; d < nb; ++d) by_prefix[it.restrict(beta, d, alpha)].push_back(d);

  {
    CheckOutcome& c = r.add("equal projections merge in G");
    for_each_bit(Pa.up(ctx.generic_atom()), [&](int rr) {
      const auto& group = by_prefix[rr];
      for (std::size_t x = 0; x < group.size(); ++x) {
        for (std::size_t y = x + 1; y < group.size(); ++y) {
          const int d1 = group[x], d2 = group[y];
          bool forced = true;
          for_each_bit(Pa.atoms_below(rr), [&](int at) {
            const auto& s = sib(at);
            forced = forced && s.pi(j, d1) == s.pi(j, d2);
          });
          if (!forced) continue;
          ++c.cases;
          bool found = false;
          for_each_bit(Pa.down(rr) & Pa.up(ctx.generic_atom()), [&](int s) {
            if (found) return;
            const int e1 = concat(it, alpha, s, beta, d1);
            found = e1 >= 0 && e1 == concat(it, alpha, s, beta, d2);
          });
          if (!found) c.fail({std::to_string(d1) + "," + std::to_string(d2), "s in G with equal concatenations", "none"});
        }
      }
    });
  }
  {
    CheckOutcome& c = r.add("merge sets are regular");
    c.note = "s ranges below the common prefix, where s^d depends only on the class of d";
    for (int p = 0; p < static_cast<int>(Pa.size()); ++p) {
      const auto& group = by_prefix[p];
      for (std::size_t x = 0; x < group.size(); ++x) {
        for (std::size_t y = x + 1; y < group.size(); ++y) {
          const Bits U = merge_set(it, alpha, beta, group[x], group[y]);
          ++c.cases;
          if (!is_downward_closed(Pa, U) || !is_regular(Pa, U)) {
            c.fail({std::to_string(group[x]) + "," + std::to_string(group[y]), "regular cut", bits_str(U)});
          }
        }
      }
    }
  }
  {
    CheckOutcome& c = r.add("order reflected below r");
    for (int p = 0; p < static_cast<int>(Pa.size()); ++p) {
      const auto& group = by_prefix[p];
      for (int rr = 0; rr < static_cast<int>(Pa.size()); ++rr) {
        if (!Pa.leq(rr, p)) continue;
        for (int d1 : group) {
          for (int d2 : group) {
            if (d1 == d2) continue;
            bool forced = true;
            for_each_bit(Pa.atoms_below(rr), [&](int at) {
              const auto& s = sib(at);
              forced = forced && s.quotient(j).poset->leq(s.pi(j, d1), s.pi(j, d2));
            });
            if (!forced) continue;
            ++c.cases;
            const int e1 = concat(it, alpha, rr, beta, d1), e2 = concat(it, alpha, rr, beta, d2);
            if (e1 < 0 || e2 < 0 || !Pb.leq(e1, e2)) {
              c.fail({"r=" + std::to_string(rr) + " " + std::to_string(d1) + "," + std::to_string(d2),
                      "r^p1 <= r^q1", std::to_string(e1) + " vs " + std::to_string(e2)});
            }
          }
        }
      }
    }
  }
  {
    CheckOutcome& c = r.add("limit stages");
    c.note = "no limit stage below a finite stage bound";
  }
  return r;
}

// ------------------------------------------------------------- factorization

Factorization factor_generic(std::shared_ptr<const Iteration> it, std::size_t alpha, int final_atom,
                             const UniverseBounds& b) {
  const std::size_t N = it->stage_count();
  const Poset& PN = it->poset(N);
  if (final_atom < 0 || final_atom >= static_cast<int>(PN.size()) || PN.atom_index(final_atom) < 0) {
    throw std::invalid_argument("final generic is not the upward closure of a minimal element");
  }
  if (alpha > N) throw std::invalid_argument("alpha beyond the last stage");
  Factorization f;
  f.alpha = alpha;
  f.final_atom = final_atom;
  f.report.suite = "theorem16";
  const Poset& Pa = it->poset(alpha);
  const Bits Gfull = PN.up(final_atom);

  // G = Gfull cut down to P_alpha, through the identification of p with p^1
  for (int p = 0; p < static_cast<int>(Pa.size()); ++p) {
    if (Gfull.test(it->embed(alpha, p, N))) f.G.set(p);
  }
  f.g = it->restrict(N, final_atom, alpha);
  {
    CheckOutcome& c = f.report.add("restricted generic is generic");
    ++c.cases;
    bool generic = is_filter(Pa, f.G);
    if (Pa.size() <= DenseSubsetStream::kMaxElements) {
      generic = generic && meets_every_dense_subset(Pa, f.G);
    } else {
      c.exhaustive = false;
      c.note = "dense sets not enumerated; compared with the upward closure of an atom";
      generic = generic && Pa.atom_index(f.g) >= 0 && f.G == Pa.up(f.g);
    }
    if (!generic) c.fail({"G", "generic filter", bits_str(f.G)});
    if (f.G != Pa.up(f.g)) c.fail({"G", bits_str(Pa.up(f.g)), bits_str(f.G)});
  }
  ProjectionContext ctx(it, alpha, f.g);
  const std::size_t j = ctx.depth();
  const Poset& Q = *ctx.quotient(j).poset;
  f.H = ctx.image(j, Gfull);
  {
    CheckOutcome& c = f.report.add("projected generic is generic");
    ++c.cases;
    if (!is_filter(Q, f.H)) c.fail({"H", "filter", bits_str(f.H)});
    if (Q.size() <= DenseSubsetStream::kMaxElements) {
      if (!meets_every_dense_subset(Q, f.H)) c.fail({"H", "meets every dense set", bits_str(f.H)});
    } else {
      c.exhaustive = false;
      c.note = "dense sets not enumerated; compared with the upward closure of an atom";
      bool up_of_atom = false;
      for (int a : Q.atoms()) up_of_atom = up_of_atom || Q.up(a) == f.H;
      if (!up_of_atom) c.fail({"H", "upward closure of an atom", bits_str(f.H)});
    }
  }
  {
    CheckOutcome& c = f.report.add("evaluations agree");
    auto st = stores_for(ctx, j);
    NameProjector proj(ctx, j, st.source, st.target);
    WorkingUniverse w = working_universe(proj, b);
    c.exhaustive = w.source_complete;
    c.note = std::to_string(w.source.size()) + " names over the final stage";
    Evaluator eg(*st.source, Filter{PN.id(), Gfull});
    Evaluator eh(*st.target, Filter{Q.id(), f.H});
    for (NameId x : w.source) {
      ++c.cases;
      const HFSet& lhs = eg(x);
      const HFSet& rhs = eh(proj(x));
      if (lhs != rhs) c.fail({st.source->format(x), lhs.str(), rhs.str()});
    }
  }
  return f;
}

// ------------------------------------------------------------- shifted stages

SuiteReport verify_quotient_shift(const ProjectionContext& ctx) {
  SuiteReport r;
  r.suite = "corollary15";
  const Iteration& it = ctx.iteration();
  const std::size_t alpha = ctx.alpha();
  IterationCaps caps;
  caps.max_stages = std::max<std::size_t>(ctx.depth(), caps.max_stages);
  Iteration S = build_iteration(shifted_provider(it.provider(), alpha, ctx.branch()), caps);

  r.add("shifted stages isomorphic");
  r.add("shifted canonical forms agree");
  CheckOutcome& iso = r.checks[0];
  CheckOutcome& canon = r.checks[1];
  std::vector<int> phi{0};  // quotient element -> shifted element, current stage
  for (std::size_t j = 0; j <= ctx.depth(); ++j) {
    const QuotientStage& q = ctx.quotient(j);
    const Poset& Q = *q.poset;
    const Poset& T = S.poset(j);
    ++iso.cases;
    if (j > 0) {
      const QuotientStage& prev = ctx.quotient(j - 1);
      const Poset& Qp = *prev.poset;
      const Poset& Pg = it.poset(alpha + j - 1);
      const IterationStage& Sp = S.stage(j - 1);
      // quotient atoms of stage j-1 -> atom positions of the shifted stage j-1
      std::vector<int> psi(Qp.atoms().size(), -1);
      bool steps_agree = true;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        const int A = prev.full_atom[i];
        const Branch& full = it.stage(alpha + j - 1).branches[Pg.atom_index(A)];
        const int t = Sp.atom_for_branch(Branch(full.begin() + static_cast<long>(alpha), full.end()));
        if (t < 0) continue;
        psi[i] = Sp.poset->atom_index(t);
        const auto& mine = it.stage(alpha + j - 1).step[Pg.atom_index(A)];
        const auto& theirs = Sp.step[psi[i]];
        steps_agree = steps_agree && mine.has_value() == theirs.has_value() &&
                      (!mine || (*mine)->same_order(**theirs));
      }
      std::vector<int> next(Q.size(), -1);
      bool mapped = steps_agree && std::find(psi.begin(), psi.end(), -1) == psi.end();
      for (int x = 0; mapped && x < static_cast<int>(Q.size()); ++x) {
        const StageCondition& c = q.conditions[x];
        StageCondition t{phi[c.prefix], std::vector<int>(Sp.poset->atoms().size(), kNotBelow)};
        for (std::size_t i = 0; i < c.tail.size(); ++i) {
          if (c.tail[i] != kNotBelow) t.tail[psi[i]] = c.tail[i];
        }
        next[x] = S.stage(j).find(t);
        mapped = next[x] >= 0;
      }
      phi = std::move(next);
      if (!mapped) {
        iso.fail({"stage " + std::to_string(j), "condition-wise correspondence", "missing counterpart"});
        continue;
      }
    }
    bool ok = Q.size() == T.size() && std::set<int>(phi.begin(), phi.end()).size() == phi.size();
    for (int x = 0; ok && x < static_cast<int>(Q.size()); ++x) {
      for (int y = 0; ok && y < static_cast<int>(Q.size()); ++y) ok = Q.leq(x, y) == T.leq(phi[x], phi[y]);
    }
    if (!ok) {
      iso.fail({"stage " + std::to_string(j), std::to_string(T.size()) + " conditions, order preserved",
                std::to_string(Q.size()) + " conditions"});
    }
    try {
      ++canon.cases;
      if (canonical_form(Q) != canonical_form(T)) canon.fail({"stage " + std::to_string(j), "equal", "different"});
    } catch (const CapExceeded&) {
      --canon.cases;
      canon.exhaustive = false;
      canon.note = "canonical form skipped where the search was too large";
    }
  }
  return r;
}

// ---------------------------------------------------------- collapse unions

SuiteReport verify_collapse_injection(const CifsToy& toy, std::shared_ptr<const Iteration> it, int final_atom) {
  SuiteReport r;
  r.suite = "lemma20";
  const std::size_t N = it->stage_count();
  const Poset& PN = it->poset(N);
  if (final_atom < 0 || PN.atom_index(final_atom) < 0) throw std::invalid_argument("final generic is not generic");
  r.add("collapse union is a total injection");
  r.add("collapse union stops at m-1");
  CheckOutcome& total = r.checks[0];
  CheckOutcome& boundary = r.checks[1];
  for (std::size_t k = 0; k < N; ++k) {
    const int g = it->restrict(N, final_atom, k);
    ProjectionContext ctx(it, k, g);
    const QuotientStage& q1 = ctx.quotient(1);
    // H restricted to the first quotient stage, read as elements of Q_k(g)
    const Bits H1 = ctx.image(1, it->poset(k + 1).up(it->restrict(N, final_atom, k + 1)));
    const CifsStepInfo& info = toy.info(k, ctx.branch());
    for (std::size_t ci = 0; ci < info.components.size(); ++ci) {
      const CifsComponent& comp = info.components[ci];
      if (!comp.collapse) continue;
      const std::size_t x = comp.domain.size();
      std::vector<int> f(x, -1);
      bool function = true;
      for_each_bit(H1, [&](int y) {
        const int qe = q1.conditions[y].tail[0];
        const auto& map = comp.col.maps[info.coords[qe][ci]];
        for (std::size_t i = 0; i < x; ++i) {
          if (map[i] < 0) continue;
          if (f[i] >= 0 && f[i] != map[i]) function = false;
          f[i] = map[i];
        }
      });
      std::set<int> values;
      std::size_t defined = 0;
      for (int v : f) {
        if (v >= 0) {
          ++defined;
          values.insert(v);
        }
      }
      const bool injective = function && values.size() == defined;
      std::string where = "stage " + std::to_string(k) + " component " + std::to_string(ci);
      if (static_cast<int>(x) < comp.m) {
        ++total.cases;
        if (!injective || defined != x) {
          total.fail({where, "total injection of size " + std::to_string(x), std::to_string(defined) + " defined"});
        }
      } else {
        ++boundary.cases;
        if (!injective || defined != static_cast<std::size_t>(comp.m - 1)) {
          boundary.fail({where, "injection of size " + std::to_string(comp.m - 1), std::to_string(defined) + " defined"});
        }
      }
    }
  }
  boundary.note = "components with |X| >= m: the union has size m-1";
  return r;
}

}  // namespace forcinglab
