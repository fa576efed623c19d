#include "forcinglab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <istream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace forcinglab {

namespace {

constexpr std::size_t kMaxPosetCap = 8;
constexpr std::size_t kMaxStagesCap = 4;
constexpr int kMaxRankCap = 3;
constexpr std::uint64_t kUniverseCap = std::uint64_t{1} << 20;

// Separative posets of one size in the library's canonical order, and for
// each the permutations of its atoms induced by automorphisms.
struct SizeClass {
  std::vector<PosetPtr> posets;
  std::vector<std::vector<std::vector<int>>> atom_perms;
};

std::vector<std::vector<int>> automorphism_atom_perms(const Poset& P) {
  const int n = static_cast<int>(P.size());
  std::vector<int> f(n);
  std::iota(f.begin(), f.end(), 0);
  std::set<std::vector<int>> perms;
  do {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      for (int b = 0; b < n && ok; ++b) ok = P.leq(a, b) == P.leq(f[a], f[b]);
    }
    if (!ok) continue;
    std::vector<int> on_atoms;
    for (int a : P.atoms()) on_atoms.push_back(P.atom_index(f[a]));
    perms.insert(on_atoms);
  } while (std::next_permutation(f.begin(), f.end()));
  return {perms.begin(), perms.end()};
}

const SizeClass& size_class(std::size_t size) {
  static std::mutex mu;
  static std::map<std::size_t, SizeClass> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;
  if (size < 1 || size > kMaxPosetCap) throw std::invalid_argument("step poset size out of range");
  SizeClass c;
  for (Poset& P : separative_posets(size, size)) {
    if (P.size() != size) continue;
    c.atom_perms.push_back(automorphism_atom_perms(P));
    c.posets.push_back(std::make_shared<const Poset>(std::move(P)));
  }
  return cache.emplace(size, std::move(c)).first->second;
}

std::size_t arity(const std::optional<PosetPtr>& q) { return q ? (*q)->atoms().size() : 1; }

struct Node {
  std::optional<PosetPtr> q;
  std::vector<int> children;
};

struct Tree {
  std::size_t stages = 0;
  std::vector<Node> nodes;  // nodes[0] is the root
};

Tree decode(const std::string& code) {
  std::vector<std::string> tok;
  std::stringstream ss(code);
  for (std::string t; std::getline(ss, t, '-');) tok.push_back(t);
  if (tok.empty() || tok[0].size() < 2 || tok[0][0] != 'n') throw std::invalid_argument("bad provider code: " + code);
  Tree t;
  try {
    t.stages = std::stoul(tok[0].substr(1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad provider code: " + code);
  }
  if (t.stages < 1 || t.stages > kMaxStagesCap) throw std::invalid_argument("bad stage count in " + code);
  std::size_t pos = 1;
  std::function<int(std::size_t)> build = [&](std::size_t depth) -> int {
    if (pos >= tok.size()) throw std::invalid_argument("provider code too short: " + code);
    const int id = static_cast<int>(t.nodes.size());
    t.nodes.push_back({step_from_token(tok[pos++]), {}});
    if (depth + 1 < t.stages) {
      const std::size_t k = arity(t.nodes[id].q);
      for (std::size_t i = 0; i < k; ++i) {
        const int child = build(depth + 1);
        t.nodes[id].children.push_back(child);
      }
    }
    return id;
  };
  build(0);
  if (pos != tok.size()) throw std::invalid_argument("provider code too long: " + code);
  return t;
}

const std::vector<std::string>& cifs_formulas() {
  static const std::vector<std::string> f = {
      "",
      "forall z (!(z in x))",
      "x = x",
      "exists z (z in x) & forall z (z in x -> forall w (!(w in z)))",
  };
  return f;
}

CifsInstance decode_cifs(const std::string& code) {
  CifsInstance c;
  c.code = code;
  std::vector<std::string> tok;
  std::stringstream ss(code);
  for (std::string t; std::getline(ss, t, '-');) tok.push_back(t);
  try {
    if (tok.size() < 2 || tok[0].size() < 2 || tok[0][0] != 'c') throw std::invalid_argument("");
    c.formula = cifs_formulas().at(std::stoul(tok[0].substr(1)));
    for (std::size_t i = 1; i < tok.size(); ++i) {
      const auto x = tok[i].find('x');
      if (x == std::string::npos) throw std::invalid_argument("");
      c.ladder.push_back({std::stoi(tok[i].substr(0, x)), std::stoi(tok[i].substr(x + 1))});
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad cifs code: " + code);
  }
  return c;
}

std::uint64_t closed_form_collapse(int x, int m) {
  // sum over k < m of C(x, k) * m! / (m - k)!
  std::uint64_t total = 0;
  for (int k = 0; k < m && k <= x; ++k) {
    std::uint64_t choose = 1, falling = 1;
    for (int i = 0; i < k; ++i) {
      choose = choose * static_cast<std::uint64_t>(x - i) / static_cast<std::uint64_t>(i + 1);
      falling *= static_cast<std::uint64_t>(m - i);
    }
    total += choose * falling;
  }
  return total;
}

// ------------------------------------------------------------------- units

struct Unit {
  std::string suite;
  std::string code;  // provider tree, cifs code or "collapse"
  std::size_t alpha = 0;
};

struct Built {
  std::shared_ptr<const Iteration> it;
  std::string error;
};

class Emitter {
 public:
  explicit Emitter(std::string suite) : suite_(std::move(suite)) {}

  void add(const std::string& instance, const SuiteReport& r) {
    for (const auto& c : r.checks) add(instance, c);
  }
  void add(const std::string& instance, CheckOutcome c, bool skipped = false) {
    out.push_back(Record{suite_, instance, order_[instance]++, std::move(c), skipped});
  }
  void skip(const std::string& instance, const std::string& why) {
    CheckOutcome c;
    c.check = "instance built";
    c.exhaustive = false;
    c.note = "skipped: " + why;
    add(instance, std::move(c), true);
  }
  void error(const std::string& instance, const std::string& what) {
    CheckOutcome c;
    c.check = "instance built";
    c.fail({instance, "no error", what});
    add(instance, std::move(c));
  }

  std::vector<Record> out;

 private:
  std::string suite_;
  std::map<std::string, std::size_t> order_;
};

std::string with(const std::string& code, std::size_t alpha, const std::string& rest) {
  return code + "/a" + std::to_string(alpha) + "/" + rest;
}

CheckOutcome separativity_outcome(const Iteration& it) {
  CheckOutcome c;
  c.check = "stages are separative";
  SeparativityReport r = check_stages_separative(it);
  for (const auto& s : r.stages) {
    ++c.cases;
    if (!s.separative) {
      std::string w = s.witness ? std::to_string(s.witness->first) + "," + std::to_string(s.witness->second) : "";
      c.fail({"stage " + std::to_string(s.n), "separative", "witness pair " + w});
    }
  }
  return c;
}

// Runs the instances of one unit; every exception becomes report data.
std::vector<Record> run_unit(const Unit& u, const Built* built, const RunConfig& cfg) {
  Emitter e(u.suite);
  const UniverseBounds b = cfg.universe_bounds();
  const std::string base = u.code;
  auto guarded = [&](const std::string& instance, const std::function<void()>& f) {
    try {
      f();
    } catch (const CapExceeded& x) {
      e.skip(instance, x.what());
    } catch (const std::exception& x) {
      e.error(instance, x.what());
    }
  };

  if (u.suite == "cifs") {
    if (u.code == "collapse") {
      for (int x = 0; x <= 3; ++x) {
        for (int m = 1; m <= 4; ++m) {
          const std::string inst = "collapse/x" + std::to_string(x) + "/m" + std::to_string(m);
          guarded(inst, [&] {
            CheckOutcome c;
            c.check = "collapse size matches the count of partial injections";
            ++c.cases;
            const auto n = collapse_poset(x, m).poset->size();
            const auto expected = closed_form_collapse(x, m);
            if (n != expected) c.fail({inst, std::to_string(expected), std::to_string(n)});
            e.add(inst, c);
          });
        }
      }
      return e.out;
    }
    guarded(base, [&] {
      CifsInstance ci = decode_cifs(u.code);
      std::vector<Formula> fs;
      if (!ci.formula.empty()) fs.push_back(parse_formula(ci.formula));
      auto toy = cifs_toy_iteration(fs, ci.ladder, cfg.max_stages);
      IterationCaps caps{cfg.max_stages, cfg.max_stage_size};
      auto it = std::make_shared<const Iteration>(build_iteration(toy->provider(), caps));
      e.add(base, separativity_outcome(*it));
      const Poset& PN = it->poset(it->stage_count());
      for (std::size_t k = 0; k < PN.atoms().size(); ++k) {
        const std::string inst = base + "/f" + std::to_string(k);
        guarded(inst, [&] { e.add(inst, verify_collapse_injection(*toy, it, PN.atoms()[k])); });
      }
    });
    return e.out;
  }

  if (!built->it) {
    e.skip(u.suite == "lemma1" ? base : with(base, u.alpha, "*"), built->error);
    return e.out;
  }
  const auto& it = built->it;
  const Poset& Pa = it->poset(u.alpha);

  if (u.suite == "lemma1") {
    e.add(base, separativity_outcome(*it));
  } else if (u.suite == "theorem2") {
    for (std::size_t gi = 0; gi < Pa.atoms().size(); ++gi) {
      guarded(with(base, u.alpha, "g" + std::to_string(gi)), [&] {
        ProjectionContext ctx(it, u.alpha, Pa.atoms()[gi]);
        for (std::size_t j = 1; j <= ctx.depth(); ++j) {
          const std::string inst = with(base, u.alpha, "g" + std::to_string(gi) + "/b" + std::to_string(u.alpha + j));
          guarded(inst, [&] { e.add(inst, verify_projection_maps(ctx, j, b)); });
        }
      });
    }
  } else if (u.suite == "projection-lemmas") {
    guarded(with(base, u.alpha, "*"), [&] {
      auto sib = sibling_contexts(it, u.alpha);
      for (std::size_t gi = 0; gi < sib.size(); ++gi) {
        for (std::size_t j = 1; j <= sib[gi].depth(); ++j) {
          const std::string inst = with(base, u.alpha, "g" + std::to_string(gi) + "/b" + std::to_string(u.alpha + j));
          guarded(inst, [&] { e.add(inst, verify_projection_properties(sib, gi, j, b)); });
        }
      }
    });
  } else if (u.suite == "theorem16") {
    const Poset& PN = it->poset(it->stage_count());
    for (std::size_t k = 0; k < PN.atoms().size(); ++k) {
      const std::string inst = with(base, u.alpha, "f" + std::to_string(k));
      guarded(inst, [&] { e.add(inst, factor_generic(it, u.alpha, PN.atoms()[k], b).report); });
    }
  } else if (u.suite == "corollary15") {
    for (std::size_t gi = 0; gi < Pa.atoms().size(); ++gi) {
      const std::string inst = with(base, u.alpha, "g" + std::to_string(gi));
      guarded(inst, [&] { e.add(inst, verify_quotient_shift(ProjectionContext(it, u.alpha, Pa.atoms()[gi]))); });
    }
  }
  return e.out;
}

std::vector<Unit> units_for(const RunConfig& cfg, const std::vector<ProviderTree>& trees) {
  std::vector<Unit> units;
  for (const auto& t : trees) {
    if (cfg.selects("lemma1")) units.push_back({"lemma1", t.code, 0});
    for (std::size_t a = 0; a <= t.stages; ++a) {
      if (a < t.stages) {
        if (cfg.selects("theorem2")) units.push_back({"theorem2", t.code, a});
        if (cfg.selects("projection-lemmas")) units.push_back({"projection-lemmas", t.code, a});
      }
      if (cfg.selects("theorem16")) units.push_back({"theorem16", t.code, a});
      if (cfg.selects("corollary15")) units.push_back({"corollary15", t.code, a});
    }
  }
  if (cfg.selects("cifs")) {
    units.push_back({"cifs", "collapse", 0});
    for (const auto& c : generate_cifs(cfg.max_stages, cfg.max_rank)) units.push_back({"cifs", c.code, 0});
  }
  return units;
}

RunResult execute(const RunConfig& cfg, const std::vector<Unit>& units, const std::string& only_instance = "") {
  const auto t0 = std::chrono::steady_clock::now();
  // iterations are built once per provider and shared read-only
  std::map<std::string, Built> built;
  for (const auto& u : units) {
    if (u.suite == "cifs" || built.count(u.code)) continue;
    Built& b = built[u.code];
    try {
      b.it = std::make_shared<const Iteration>(
          build_iteration(tree_provider(u.code), IterationCaps{cfg.max_stages, cfg.max_stage_size}));
    } catch (const CapExceeded& x) {
      b.error = x.what();
    }
  }

  std::vector<std::vector<Record>> slots(units.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      const Built* b = units[i].suite == "cifs" ? nullptr : &built.at(units[i].code);
      slots[i] = run_unit(units[i], b, cfg);
    }
  };
  std::size_t n = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, std::max<std::size_t>(units.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  RunResult r;
  std::map<std::string, std::set<std::string>> instances;
  for (auto& s : slots) {
    for (auto& rec : s) {
      if (!only_instance.empty() && rec.instance != only_instance) continue;
      instances[rec.suite].insert(rec.instance);
      r.records.push_back(std::move(rec));
    }
  }
  std::sort(r.records.begin(), r.records.end(), [](const Record& a, const Record& b) {
    return std::tie(a.instance, a.suite, a.order) < std::tie(b.instance, b.suite, b.order);
  });
  for (const auto& [s, set] : instances) r.census[s] = set.size();
  for (const auto& rec : r.records) {
    if (!rec.outcome.ok()) ++r.counterexamples;
    if (rec.skipped) ++r.skipped;
    if (!rec.outcome.exhaustive) ++r.inexhaustive;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

// ------------------------------------------------------------------ config

void RunConfig::validate() const {
  if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw std::invalid_argument("unknown suite: " + suite);
  }
  if (max_poset < 1 || max_poset > kMaxPosetCap) throw std::invalid_argument("max-poset must be in 1..8");
  if (max_stages < 1 || max_stages > kMaxStagesCap) throw std::invalid_argument("max-stages must be in 1..4");
  if (max_rank < 0 || max_rank > kMaxRankCap) throw std::invalid_argument("max-rank must be in 0..3");
  if (cap < 1 || cap > kUniverseCap) throw std::invalid_argument("cap must be in 1..2^20");
  if (max_stage_size < 1 || max_stage_size > kMaxElements) throw std::invalid_argument("max-stage-size must be in 1..256");
}

UniverseBounds RunConfig::universe_bounds() const {
  UniverseBounds b;
  b.max_rank = max_rank;
  b.cap = cap;
  b.sample = sample;
  b.max_pairs = max_pairs;
  b.seed = seed;
  return b;
}

// --------------------------------------------------------------- providers

std::string step_token(const std::optional<PosetPtr>& q) {
  if (!q) return "u";
  const SizeClass& c = size_class((*q)->size());
  const std::string form = canonical_form(**q);
  for (std::size_t k = 0; k < c.posets.size(); ++k) {
    if (canonical_form(*c.posets[k]) == form) return "s" + std::to_string((*q)->size()) + "_" + std::to_string(k);
  }
  throw std::invalid_argument("not a separative step poset");
}

std::optional<PosetPtr> step_from_token(const std::string& token) {
  if (token == "u") return std::nullopt;
  const auto us = token.find('_');
  if (token.size() < 4 || token[0] != 's' || us == std::string::npos) throw std::invalid_argument("bad step token " + token);
  std::size_t size = 0, k = 0;
  try {
    size = std::stoul(token.substr(1, us - 1));
    k = std::stoul(token.substr(us + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad step token " + token);
  }
  const SizeClass& c = size_class(size);
  if (k >= c.posets.size()) throw std::invalid_argument("bad step token " + token);
  return c.posets[k];
}

std::vector<ProviderTree> generate_providers(std::size_t max_poset, std::size_t max_stages) {
  // step choices with their atom permutations
  struct Choice {
    std::string token;
    std::size_t arity;
    std::vector<std::vector<int>> perms;
  };
  std::vector<Choice> choices{{"u", 1, {{0}}}};
  for (std::size_t s = 1; s <= max_poset; ++s) {
    const SizeClass& c = size_class(s);
    for (std::size_t k = 0; k < c.posets.size(); ++k) {
      choices.push_back({"s" + std::to_string(s) + "_" + std::to_string(k), c.posets[k]->atoms().size(), c.atom_perms[k]});
    }
  }
  // trees[d]: preorder token strings of trees with d stages
  std::vector<std::vector<std::string>> trees(max_stages + 1);
  for (const auto& ch : choices) trees[1].push_back(ch.token);
  for (std::size_t d = 2; d <= max_stages; ++d) {
    const auto& sub = trees[d - 1];
    for (const auto& ch : choices) {
      std::vector<std::size_t> t(ch.arity, 0);
      for (;;) {
        // keep the tuple only when no automorphism makes it smaller
        bool least = true;
        for (const auto& p : ch.perms) {
          std::vector<std::size_t> img(ch.arity);
          for (std::size_t i = 0; i < ch.arity; ++i) img[i] = t[p[i]];
          if (img < t) {
            least = false;
            break;
          }
        }
        if (least) {
          std::string s = ch.token;
          for (std::size_t i : t) s += "-" + sub[i];
          trees[d].push_back(s);
        }
        std::size_t i = 0;
        while (i < ch.arity && ++t[i] == sub.size()) t[i++] = 0;
        if (i == ch.arity) break;
      }
    }
  }
  std::vector<ProviderTree> out;
  for (std::size_t d = 1; d <= max_stages; ++d) {
    for (const auto& s : trees[d]) out.push_back({d, "n" + std::to_string(d) + "-" + s});
  }
  return out;
}

StepProvider tree_provider(const std::string& code) {
  auto t = std::make_shared<const Tree>(decode(code));
  return StepProvider{t->stages, [t](std::size_t n, const Branch& b) -> std::optional<PosetPtr> {
                        int node = 0;
                        for (std::size_t k = 0; k < n; ++k) node = t->nodes[node].children.at(b.at(k));
                        return t->nodes[node].q;
                      }};
}

std::vector<CifsInstance> generate_cifs(std::size_t max_stages, int max_rank) {
  std::vector<CifsInstance> out;
  const int top_rank = std::min(max_rank, 2);
  std::vector<std::vector<LadderStep>> ladders;
  std::function<void(std::vector<LadderStep>&)> grow = [&](std::vector<LadderStep>& l) {
    if (!l.empty()) ladders.push_back(l);
    if (l.size() == max_stages) return;
    for (int r = 0; r <= top_rank; ++r) {
      for (int m = l.empty() ? 1 : l.back().m + 1; m <= 4; ++m) {
        l.push_back({r, m});
        grow(l);
        l.pop_back();
      }
    }
  };
  std::vector<LadderStep> l;
  grow(l);
  for (std::size_t f = 0; f < cifs_formulas().size(); ++f) {
    for (const auto& lad : ladders) {
      CifsInstance c{cifs_formulas()[f], lad, "c" + std::to_string(f)};
      for (const auto& s : lad) c.code += "-" + std::to_string(s.rank) + "x" + std::to_string(s.m);
      out.push_back(std::move(c));
    }
  }
  return out;
}

// -------------------------------------------------------------------- runs

RunResult run_suites(const RunConfig& config) {
  config.validate();
  auto trees = config.suite == "cifs" ? std::vector<ProviderTree>{}
                                      : generate_providers(config.max_poset, config.max_stages);
  return execute(config, units_for(config, trees));
}

RunResult replay(const RunConfig& config, const std::string& id) {
  config.validate();
  const auto first = id.find('/');
  const auto last = id.rfind('/');
  if (first == std::string::npos || last == first) throw std::out_of_range("malformed counterexample id: " + id);
  Unit u{id.substr(0, first), "", 0};
  const std::string instance = id.substr(first + 1, last - first - 1);
  const auto slash = instance.find('/');
  u.code = instance.substr(0, slash);
  if (u.suite == "cifs") {
    if (u.code == "collapse") u.code = "collapse";
  } else if (slash != std::string::npos && u.suite != "lemma1") {
    const auto a = instance.substr(slash + 1);
    if (a.empty() || a[0] != 'a') throw std::out_of_range("malformed instance: " + instance);
    u.alpha = std::stoul(a.substr(1));
  }
  RunConfig c = config;
  c.suite = u.suite;
  c.validate();
  RunResult r = execute(c, {u}, instance);
  if (r.records.empty()) throw std::out_of_range("no such instance: " + instance);
  return r;
}

// ----------------------------------------------------------------- reports

namespace {

nlohmann::json config_json(const RunConfig& c) {
  return {{"kind", "config"},        {"suite", c.suite}, {"max_poset", c.max_poset}, {"max_stages", c.max_stages},
          {"max_rank", c.max_rank},  {"cap", c.cap},     {"sample", c.sample},       {"max_pairs", c.max_pairs},
          {"max_stage_size", c.max_stage_size}, {"seed", c.seed}};
}

}  // namespace

void write_report(std::ostream& os, const RunConfig& config, const RunResult& result) {
  os << config_json(config).dump() << '\n';
  for (const auto& r : result.records) {
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& x : r.outcome.examples) ex.push_back({{"inputs", x.inputs}, {"expected", x.expected}, {"got", x.got}});
    nlohmann::json j = {{"kind", "check"},
                        {"id", r.id()},
                        {"suite", r.suite},
                        {"instance", r.instance},
                        {"check", r.outcome.check},
                        {"cases", r.outcome.cases},
                        {"failures", r.outcome.failures},
                        {"exhaustive", r.outcome.exhaustive},
                        {"skipped", r.skipped},
                        {"note", r.outcome.note},
                        {"examples", ex}};
    os << j.dump() << '\n';
  }
  nlohmann::json s = {{"kind", "summary"},
                      {"census", result.census},
                      {"records", result.records.size()},
                      {"counterexamples", result.counterexamples},
                      {"skipped", result.skipped},
                      {"inexhaustive", result.inexhaustive},
                      {"status", result.exit_status()}};
  os << s.dump() << '\n';
}

RunConfig read_report_config(std::istream& is, std::vector<std::string>* ids) {
  RunConfig c;
  std::string line;
  bool seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("malformed report line: ") + e.what());
    }
    const std::string kind = j.value("kind", "");
    if (kind == "config") {
      c.suite = j.at("suite").get<std::string>();
      c.max_poset = j.at("max_poset").get<std::size_t>();
      c.max_stages = j.at("max_stages").get<std::size_t>();
      c.max_rank = j.at("max_rank").get<int>();
      c.cap = j.at("cap").get<std::uint64_t>();
      c.sample = j.at("sample").get<std::size_t>();
      c.max_pairs = j.at("max_pairs").get<std::size_t>();
      c.max_stage_size = j.at("max_stage_size").get<std::size_t>();
      c.seed = j.at("seed").get<std::uint64_t>();
      seen = true;
    } else if (kind == "check" && ids && j.at("failures").get<std::size_t>() > 0) {
      ids->push_back(j.at("id").get<std::string>());
    }
  }
  if (!seen) throw std::invalid_argument("report has no config record");
  return c;
}

std::string summary_table(const RunResult& result) {
  struct Row {
    std::size_t instances = 0, checks = 0, cases = 0, failures = 0, partial = 0, skipped = 0;
  };
  std::map<std::string, Row> rows;
  for (const auto& [s, n] : result.census) rows[s].instances = n;
  for (const auto& r : result.records) {
    Row& row = rows[r.suite];
    ++row.checks;
    row.cases += r.outcome.cases;
    row.failures += r.outcome.ok() ? 0 : 1;
    row.partial += r.outcome.exhaustive ? 0 : 1;
    row.skipped += r.skipped ? 1 : 0;
  }
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-18s %9s %8s %12s %8s %8s %8s\n", "suite", "instances", "checks", "cases", "failing",
                "sampled", "skipped");
  os << buf;
  for (const auto& [s, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %9zu %8zu %12zu %8zu %8zu %8zu\n", s.c_str(), r.instances, r.checks, r.cases,
                  r.failures, r.partial, r.skipped);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "counterexamples: %zu   wall time: %.1fs\n", result.counterexamples, result.seconds);
  os << buf;
  return os.str();
}

}  // namespace forcinglab
