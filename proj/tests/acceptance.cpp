// Acceptance sweep: one line per criterion, PASS / PARTIAL / FAIL.
// PARTIAL means no counterexample was found but part of the range was
// sampled or skipped at a cap.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "forcinglab/generic.hpp"
#include "forcinglab/names.hpp"
#include "forcinglab/runner.hpp"
#include "oracles.hpp"

using namespace forcinglab;
using Elem = BoolAlgebra::Elem;

namespace {

struct Tally {
  std::uint64_t cases = 0, failures = 0, inexhaustive = 0, skipped = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    ++cases;
    if (!ok) {
      ++failures;
      if (notes.size() < 5) notes.push_back(what);
    }
  }
};

int failed_criteria = 0;

void report(int n, const std::string& title, const Tally& t, const std::string& detail) {
  const char* status = t.failures ? "FAIL" : (t.inexhaustive || t.skipped) ? "PARTIAL" : "PASS";
  if (t.failures) ++failed_criteria;
  std::cout << "[" << status << "] criterion " << n << ": " << title << " | cases " << t.cases << ", failures "
            << t.failures << ", sampled " << t.inexhaustive << ", skipped " << t.skipped;
  if (!detail.empty()) std::cout << " | " << detail;
  std::cout << "\n";
  for (const auto& s : t.notes) std::cout << "    " << s << "\n";
  std::cout.flush();
}

// Criterion 1

void laws() {
  Tally t;
  const auto posets = separative_posets(5, 5);
  t.expect(posets.size() == 5, "separative posets with at most 5 elements: expected 5");
  for (const Poset& P : posets) {
    auto base = std::make_shared<const Poset>(P);
    BoolAlgebra A(base);
    t.expect(check_laws(A).ok(), "law suite on " + std::to_string(P.size()) + " elements");
    const auto cuts = oracle::regular_cuts(P);
    t.expect(cuts.size() == A.size(), "algebra size against regular cut enumeration");
    std::set<std::string> got, want;
    for (Elem e = 0; e <= A.one(); ++e) got.insert(A.members(e).to_string());
    for (const Bits& b : cuts) want.insert(b.to_string());
    t.expect(got == want, "algebra elements are the regular cuts");
    // p -> down-cone is a dense order embedding
    const int n = static_cast<int>(P.size());
    for (int p = 0; p < n; ++p) {
      Bits down;
      for (int q = 0; q < n; ++q) {
        if (P.leq(q, p)) down.set(q);
      }
      t.expect(A.members(A.principal(p)) == down, "principal cut is the down-cone");
      for (int q = 0; q < n; ++q) t.expect(P.leq(p, q) == A.leq(A.principal(p), A.principal(q)), "order embedding");
    }
    for (const Bits& c : cuts) {
      if (c.none()) continue;
      bool dense = false;
      for (int p = 0; p < n; ++p) dense = dense || (c.test(p) && A.leq(A.principal(p), A.index_of(c)));
      t.expect(dense, "a principal cut lies below every nonzero cut");
    }
  }
  std::ostringstream sizes;
  for (std::size_t k = 1; k <= 4; ++k) {
    BoolAlgebra A(std::make_shared<const Poset>(Poset::antichain(k)));
    t.expect(A.size() == (std::size_t{1} << k), "antichain algebra size");
    t.expect(oracle::regular_cuts(Poset::antichain(k)).size() == (std::size_t{1} << k), "antichain regular cuts");
    sizes << (k > 1 ? "," : "") << A.size();
  }
  report(1, "Boolean algebra laws and dense embedding", t,
         std::to_string(posets.size()) + " separative posets; antichain algebra sizes " + sizes.str());
}

// Criterion 2

struct Structure {
  FiniteStructure s;
  std::vector<int> constants;
};

Structure structure_of(const std::vector<HFSet>& values) {
  std::set<HFSet> all;
  for (const HFSet& v : values) {
    all.insert(v);
    for (const HFSet& w : transitive_closure(v)) all.insert(w);
  }
  std::vector<HFSet> dom(all.begin(), all.end());
  Structure out;
  out.s.size = dom.size();
  out.s.in.assign(dom.size(), std::vector<bool>(dom.size(), false));
  for (std::size_t a = 0; a < dom.size(); ++a) {
    for (std::size_t b = 0; b < dom.size(); ++b) out.s.in[a][b] = dom[b].contains(dom[a]);
  }
  for (const HFSet& v : values) {
    out.constants.push_back(static_cast<int>(std::lower_bound(dom.begin(), dom.end(), v) - dom.begin()));
  }
  return out;
}

// Value of a formula in the algebra, and its truth in each extension.
struct State {
  Elem value = 0;
  std::uint64_t truth = 0;  // bit g: true in V[G_g]
  auto operator<=>(const State&) const = default;
};

class TruthLemma {
 public:
  TruthLemma(const Poset& P, Tally& t) : t_(t) {
    auto A = std::make_shared<const BoolAlgebra>(std::make_shared<const Poset>(P));
    store_ = std::make_shared<NameStore>(A);
    session_ = std::make_unique<TruthSession>(store_);
    generics_ = enumerate_generics(P);
  }

  const BoolAlgebra& algebra() const { return store_->algebra(); }
  std::shared_ptr<NameStore> store() const { return store_; }

  // b meets G, i.e. some p in G has its principal cut below b.
  bool meets(Elem b, std::size_t g) const { return (algebra().members(b) & generics_[g].filter.members).any(); }

  void check_ultrafilters() {
    const BoolAlgebra& A = algebra();
    for (std::size_t g = 0; g < generics_.size(); ++g) {
      for (Elem b = 0; b <= A.one(); ++b) {
        t_.expect(meets(A.complement(b), g) != meets(b, g), "generic meets exactly one of b and its complement");
        for (Elem c = 0; c <= A.one(); ++c) {
          t_.expect(meets(A.meet(b, c), g) == (meets(b, g) && meets(c, g)), "generic meets a meet iff both");
        }
      }
    }
  }

  // Checks phi against every generic and returns its state.
  State check(const Formula& f, std::span<const NameId> constants, const std::vector<Structure>& ext) {
    State s;
    s.value = session_->value(f, constants);
    for (std::size_t g = 0; g < generics_.size(); ++g) {
      const bool truth = holds(f, ext[g].s, {}, ext[g].constants);
      if (truth) s.truth |= std::uint64_t{1} << g;
      bool forced = false;
      for_each_bit(generics_[g].filter.members,
                   [&](int p) { forced = forced || forces(*session_, p, f, constants); });
      t_.expect(forced == truth, "some p in G forces " + to_string(f) + " iff it holds in V[G]");
      t_.expect(meets(s.value, g) == truth, "truth value of " + to_string(f) + " meets G iff it holds in V[G]");
    }
    return s;
  }

  std::vector<Structure> extensions(std::span<const NameId> constants) {
    std::vector<Structure> out;
    for (const auto& G : generics_) {
      std::vector<HFSet> vals;
      for (NameId c : constants) vals.push_back(evaluate(*store_, c, G.filter));
      out.push_back(structure_of(vals));
    }
    return out;
  }

 private:
  Tally& t_;
  std::shared_ptr<NameStore> store_;
  std::unique_ptr<TruthSession> session_;
  std::vector<GenericSet> generics_;
};

std::vector<Formula> atomic_formulas() {
  std::vector<Formula> out;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      out.push_back(member(Term::constant(a), Term::constant(b)));
      out.push_back(equal(Term::constant(a), Term::constant(b)));
    }
  }
  return out;
}

// Quantifier-free formulas of depth <= 3 over the atomic ones, one per
// reachable state. Every compound formula is checked against the state
// computed from its parts, so any formula of that depth has the state of
// some representative here.
void formula_closure(TruthLemma& L, Tally& t, std::span<const NameId> constants, const std::vector<Formula>& atoms,
                     const std::vector<State>& atom_states, const std::vector<Structure>& ext,
                     std::size_t generic_count) {
  const BoolAlgebra& A = L.algebra();
  const std::uint64_t all = generic_count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << generic_count) - 1;
  std::map<State, std::pair<Formula, int>> reps;
  for (std::size_t i = 0; i < atoms.size(); ++i) reps.emplace(atom_states[i], std::make_pair(atoms[i], 0));
  for (int d = 1; d <= 3; ++d) {
    std::vector<std::pair<State, Formula>> found;
    std::vector<std::pair<State, std::pair<Formula, int>>> cur(reps.begin(), reps.end());
    auto visit = [&](const Formula& f, State expect) {
      const State got = L.check(f, constants, ext);
      t.expect(got == expect, "connectives act on parts: " + to_string(f));
      found.emplace_back(got, f);
    };
    for (const auto& [s, fd] : cur) {
      if (fd.second != d - 1) continue;
      visit(negate(fd.first), {A.complement(s.value), all & ~s.truth});
      for (const auto& [s2, fd2] : cur) {
        visit(conj(fd.first, fd2.first), {A.meet(s.value, s2.value), s.truth & s2.truth});
        visit(disj(fd.first, fd2.first), {A.join(s.value, s2.value), s.truth | s2.truth});
        visit(implies(fd.first, fd2.first), {A.join(A.complement(s.value), s2.value), (all & ~s.truth) | s2.truth});
        if (fd2.second == d - 1) continue;
        visit(conj(fd2.first, fd.first), {A.meet(s2.value, s.value), s2.truth & s.truth});
        visit(disj(fd2.first, fd.first), {A.join(s2.value, s.value), s2.truth | s.truth});
        visit(implies(fd2.first, fd.first), {A.join(A.complement(s2.value), s.value), (all & ~s2.truth) | s.truth});
      }
    }
    for (const auto& [s, f] : found) reps.emplace(s, std::make_pair(f, d));
  }
}

std::vector<NameId> sampled_rank2(const std::shared_ptr<NameStore>& store, const std::vector<NameId>& low,
                                  std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Elem one = store->algebra().one();
  std::set<NameId> out;
  std::size_t tries = 0;
  while (out.size() < count && tries++ < 100 * count) {
    std::vector<NameEntry> entries;
    for (NameId c : low) {
      const Elem cut = static_cast<Elem>(rng() % (one + 1));
      if (cut != 0) entries.push_back({c, cut});
    }
    const NameId n = store->make(entries);
    if (store->rank(n) == 2) out.insert(n);
  }
  return {out.begin(), out.end()};
}

void truth_lemma() {
  constexpr std::uint64_t kCompleteCap = 4096;
  constexpr std::size_t kRank2Sample = 24;
  Tally t;
  std::size_t posets = 0, pairs = 0, classes = 0;
  const auto atoms = atomic_formulas();
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const Poset& P : posets_of_size(n)) {
      ++posets;
      TruthLemma L(P, t);
      L.check_ultrafilters();
      const std::size_t generic_count = enumerate_generics(P).size();
      std::vector<NameId> U;
      if (universe_size(L.algebra().size(), 2) <= kCompleteCap) {
        U = name_universe(L.store(), 2, kCompleteCap).names;
      } else {
        U = name_universe(L.store(), 1, kCompleteCap).names;
        const auto extra = sampled_rank2(L.store(), U, kRank2Sample, 1000 + posets);
        U.insert(U.end(), extra.begin(), extra.end());
        ++t.inexhaustive;
      }
      // constants up to the state vector of the atomic formulas
      std::map<std::vector<State>, std::pair<NameId, NameId>> seen;
      for (NameId x : U) {
        for (NameId y : U) {
          ++pairs;
          const NameId cs[2] = {x, y};
          const auto ext = L.extensions(cs);
          std::vector<State> key;
          for (const Formula& f : atoms) key.push_back(L.check(f, cs, ext));
          seen.emplace(key, std::make_pair(x, y));
        }
      }
      for (const auto& [key, xy] : seen) {
        ++classes;
        const NameId cs[2] = {xy.first, xy.second};
        formula_closure(L, t, cs, atoms, key, L.extensions(cs), generic_count);
      }
    }
  }
  report(2, "truth lemma for quantifier-free formulas of depth <= 3", t,
         std::to_string(posets) + " posets, " + std::to_string(pairs) + " constant pairs, " + std::to_string(classes) +
             " atomic state classes; rank-2 universes over 8-element algebras are sampled (" +
             std::to_string(kRank2Sample) + " names)");
}

// Criteria 3 to 9 from one sweep

Tally slice(const RunResult& r, const std::string& suite, const std::set<std::string>& checks, bool include) {
  Tally t;
  for (const Record& rec : r.records) {
    if (rec.suite != suite) continue;
    if (rec.skipped) {
      ++t.skipped;
      continue;
    }
    if (rec.outcome.check == "instance built") {
      t.expect(false, rec.id() + ": " + rec.outcome.note);
      continue;
    }
    if (checks.count(rec.outcome.check) != static_cast<std::size_t>(include)) continue;
    t.cases += rec.outcome.cases;
    t.failures += rec.outcome.failures;
    if (rec.outcome.failures && t.notes.size() < 5) t.notes.push_back(rec.id());
    if (!rec.outcome.exhaustive) ++t.inexhaustive;
  }
  return t;
}

std::string census(const RunResult& r, const std::string& suite) {
  return std::to_string(r.census.count(suite) ? r.census.at(suite) : 0) + " instances";
}

void sweep() {
  RunConfig c;
  c.suite = "all";
  c.max_poset = 3;
  c.max_stages = 3;
  c.max_rank = 2;
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_suites(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "sweep: max-poset 3, max-stages 3, max-rank 2, seed 0: " << r.records.size() << " records in "
            << static_cast<int>(secs) << "s\n";

  Tally t3 = slice(r, "lemma1", {}, false);
  // 3 + 12 + 102 provider trees with one, two and three stages
  t3.expect(r.census.at("lemma1") == 117, "lemma1 census: expected 117 providers");
  report(3, "every stage poset is separative", t3, census(r, "lemma1"));

  const std::set<std::string> hom = {"cut map is a complete homomorphism"};
  report(4, "cut map is a complete Boolean homomorphism", slice(r, "theorem2", hom, true), census(r, "theorem2"));

  const std::set<std::string> names = {"name map is onto", "atomic values transported"};
  Tally t5 = slice(r, "theorem2", names, true);
  report(5, "name map onto and atomic values transported", t5,
         census(r, "theorem2") + "; rank-2 universes over algebras above 4 elements are sampled");

  report(6, "projection property suite", slice(r, "projection-lemmas", names, false),
         census(r, "projection-lemmas") + "; forcing transport over large algebras is sampled");

  report(7, "factorization of generics and evaluations", slice(r, "theorem16", {}, false),
         census(r, "theorem16") + "; names over algebras above 4 elements are sampled");

  // the explicit isomorphism decides the criterion; canonical forms are a
  // second route that gives up on large relabeling searches
  Tally t8 = slice(r, "corollary15", {"shifted canonical forms agree"}, false);
  const Tally canon = slice(r, "corollary15", {"shifted canonical forms agree"}, true);
  t8.failures += canon.failures;
  t8.notes.insert(t8.notes.end(), canon.notes.begin(), canon.notes.end());
  report(8, "quotient stages isomorphic to shifted stages", t8,
         census(r, "corollary15") + "; canonical form route: " + std::to_string(canon.cases) + " cases, " +
             std::to_string(canon.failures) + " failures, " + std::to_string(canon.inexhaustive) +
             " records with the search skipped");

  Tally t9 = slice(r, "cifs", {"stages are separative"}, false);
  for (int x = 0; x <= 3; ++x) {
    for (int m = 1; m <= 4; ++m) {
      t9.expect(collapse_count(x, m) == oracle::partial_injections(x, m),
                "collapse count x=" + std::to_string(x) + " m=" + std::to_string(m));
    }
  }
  t9.expect(collapse_count(2, 2) == 5, "collapse count x=2 m=2: expected 5");
  t9.expect(collapse_count(2, 3) == 13, "collapse count x=2 m=3: expected 13");
  report(9, "collapse counts and collapse unions", t9,
         census(r, "cifs") + "; skipped instances exceed the 256-condition stage bound");
}

// Criterion 10

std::string file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void determinism() {
  Tally t;
  RunConfig c;
  c.suite = "all";
  c.max_stages = 2;
  c.seed = 11;
  const std::string paths[2] = {"acceptance_run_a.jsonl", "acceptance_run_b.jsonl"};
  for (const auto& p : paths) {
    std::ofstream os(p, std::ios::binary);
    write_report(os, c, run_suites(c));
  }
  const std::string a = file_bytes(paths[0]), b = file_bytes(paths[1]);
  t.expect(!a.empty(), "report written");
  t.expect(a == b, "reports differ");
  report(10, "identical config and seed give identical report files", t,
         "max-stages 2, all suites, seed 11, " + std::to_string(a.size()) + " bytes");
}

}  // namespace

int main() {
  laws();
  truth_lemma();
  sweep();
  determinism();
  return failed_criteria ? 1 : 0;
}
