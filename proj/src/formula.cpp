#include "forcinglab/formula.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace forcinglab {

namespace {

Formula make(FormulaNode n) { return std::make_shared<const FormulaNode>(std::move(n)); }

}  // namespace

Formula member(Term x, Term y) { return make(FormulaNode{Op::Member, std::move(x), std::move(y), {}, nullptr, nullptr}); }
Formula equal(Term x, Term y) { return make(FormulaNode{Op::Equal, std::move(x), std::move(y), {}, nullptr, nullptr}); }
Formula negate(Formula f) { return make(FormulaNode{Op::Not, {}, {}, {}, std::move(f), nullptr}); }
Formula conj(Formula f, Formula g) { return make(FormulaNode{Op::And, {}, {}, {}, std::move(f), std::move(g)}); }
Formula disj(Formula f, Formula g) { return make(FormulaNode{Op::Or, {}, {}, {}, std::move(f), std::move(g)}); }
Formula implies(Formula f, Formula g) { return make(FormulaNode{Op::Implies, {}, {}, {}, std::move(f), std::move(g)}); }
Formula exists(std::string v, Formula f) { return make(FormulaNode{Op::Exists, {}, {}, std::move(v), std::move(f), nullptr}); }
Formula forall(std::string v, Formula f) { return negate(exists(std::move(v), negate(std::move(f)))); }

namespace {

bool is_keyword(std::string_view w) { return w == "in" || w == "exists" || w == "forall"; }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Formula parse() {
    Formula f = implication();
    skip();
    if (pos_ != s_.size()) throw ParseError(pos_, "unexpected input");
    return f;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(pos_, tok.size()) != tok) return false;
    // keywords must not run into an identifier
    if (std::isalpha(static_cast<unsigned char>(tok.back()))) {
      std::size_t end = pos_ + tok.size();
      if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
    }
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!eat(tok)) throw ParseError(pos_, "expected '" + std::string(tok) + "'");
  }

  std::string identifier() {
    skip();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    }
    if (start == pos_) throw ParseError(pos_, "expected identifier");
    std::string w(s_.substr(start, pos_ - start));
    if (is_keyword(w)) {
      pos_ = start;
      throw ParseError(start, "unexpected keyword '" + w + "'");
    }
    return w;
  }

  Term term() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '$') {
      ++pos_;
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError(pos_, "expected constant index");
      return Term::constant(std::stoi(std::string(s_.substr(start, pos_ - start))));
    }
    return Term::variable(identifier());
  }

  Formula implication() {
    Formula f = disjunction();
    if (eat("->")) return implies(f, implication());
    return f;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (eat("|")) f = disj(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (eat("&")) f = conj(f, unary());
    return f;
  }

  Formula unary() {
    if (eat("!")) return negate(unary());
    if (eat("exists")) return quantified(false);
    if (eat("forall")) return quantified(true);
    if (eat("(")) {
      Formula f = implication();
      expect(")");
      return f;
    }
    return atom();
  }

  Formula quantified(bool universal) {
    std::string v = identifier();
    expect("(");
    Formula body = implication();
    expect(")");
    return universal ? forall(v, body) : exists(v, body);
  }

  Formula atom() {
    Term x = term();
    if (eat("in")) return member(x, term());
    if (eat("=")) return equal(x, term());
    skip();
    throw ParseError(pos_, "expected 'in' or '='");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string term_string(const Term& t) { return t.is_var() ? t.var : "$" + std::to_string(t.index); }

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f->op) {
    case Op::Member:
    case Op::Equal:
      for (const Term* t : {&f->lhs, &f->rhs}) {
        if (t->is_var() && !bound.count(t->var)) out.insert(t->var);
      }
      return;
    case Op::Not:
      collect_free(f->a, bound, out);
      return;
    case Op::Exists: {
      bool fresh = bound.insert(f->var).second;
      collect_free(f->a, bound, out);
      if (fresh) bound.erase(f->var);
      return;
    }
    default:
      collect_free(f->a, bound, out);
      collect_free(f->b, bound, out);
  }
}

bool binds(const Formula& f, const std::string& v) {
  switch (f->op) {
    case Op::Member:
    case Op::Equal:
      return false;
    case Op::Not:
      return binds(f->a, v);
    case Op::Exists:
      return f->var == v || binds(f->a, v);
    default:
      return binds(f->a, v) || binds(f->b, v);
  }
}

Formula subst(const Formula& f, const std::string& v, int k) {
  auto sub = [&](const Term& t) { return t.is_var() && t.var == v ? Term::constant(k) : t; };
  switch (f->op) {
    case Op::Member:
      return member(sub(f->lhs), sub(f->rhs));
    case Op::Equal:
      return equal(sub(f->lhs), sub(f->rhs));
    case Op::Not:
      return negate(subst(f->a, v, k));
    case Op::Exists:
      return exists(f->var, subst(f->a, v, k));
    case Op::And:
      return conj(subst(f->a, v, k), subst(f->b, v, k));
    case Op::Or:
      return disj(subst(f->a, v, k), subst(f->b, v, k));
    case Op::Implies:
      return implies(subst(f->a, v, k), subst(f->b, v, k));
  }
  return f;
}

}  // namespace

Formula parse_formula(std::string_view text, ParseOptions opts) {
  Formula f = Parser(text).parse();
  if (opts.require_closed) {
    auto fv = free_variables(f);
    if (!fv.empty()) {
      std::string names;
      for (const auto& v : fv) names += (names.empty() ? "" : ", ") + v;
      throw FormulaError("unbound variables: " + names);
    }
  }
  return f;
}

std::string to_string(const Formula& f) {
  switch (f->op) {
    case Op::Member:
      return term_string(f->lhs) + " in " + term_string(f->rhs);
    case Op::Equal:
      return term_string(f->lhs) + " = " + term_string(f->rhs);
    case Op::Not:
      return "!" + to_string(f->a);
    case Op::Exists:
      return "exists " + f->var + " (" + to_string(f->a) + ")";
    case Op::And:
      return "(" + to_string(f->a) + " & " + to_string(f->b) + ")";
    case Op::Or:
      return "(" + to_string(f->a) + " | " + to_string(f->b) + ")";
    case Op::Implies:
      return "(" + to_string(f->a) + " -> " + to_string(f->b) + ")";
  }
  return {};
}

bool same_formula(const Formula& f, const Formula& g) {
  if (f == g) return true;
  if (!f || !g || f->op != g->op) return false;
  switch (f->op) {
    case Op::Member:
    case Op::Equal:
      return f->lhs == g->lhs && f->rhs == g->rhs;
    case Op::Not:
      return same_formula(f->a, g->a);
    case Op::Exists:
      return f->var == g->var && same_formula(f->a, g->a);
    default:
      return same_formula(f->a, g->a) && same_formula(f->b, g->b);
  }
}

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::set<int> constants(const Formula& f) {
  std::set<int> out;
  auto walk = [&](auto&& self, const Formula& g) -> void {
    switch (g->op) {
      case Op::Member:
      case Op::Equal:
        if (!g->lhs.is_var()) out.insert(g->lhs.index);
        if (!g->rhs.is_var()) out.insert(g->rhs.index);
        return;
      case Op::Not:
      case Op::Exists:
        self(self, g->a);
        return;
      default:
        self(self, g->a);
        self(self, g->b);
    }
  };
  walk(walk, f);
  return out;
}

int depth(const Formula& f) {
  switch (f->op) {
    case Op::Member:
    case Op::Equal:
      return 1;
    case Op::Not:
    case Op::Exists:
      return 1 + depth(f->a);
    default:
      return 1 + std::max(depth(f->a), depth(f->b));
  }
}

bool quantifier_free(const Formula& f) {
  switch (f->op) {
    case Op::Member:
    case Op::Equal:
      return true;
    case Op::Exists:
      return false;
    case Op::Not:
      return quantifier_free(f->a);
    default:
      return quantifier_free(f->a) && quantifier_free(f->b);
  }
}

Formula substitute(const Formula& f, const std::string& var, int k) {
  if (binds(f, var)) throw FormulaError("cannot substitute for bound variable '" + var + "'");
  return subst(f, var, k);
}

namespace {

int lookup(const Term& t, const std::map<std::string, int>& env, std::span<const int> consts) {
  if (t.is_var()) {
    auto it = env.find(t.var);
    if (it == env.end()) throw FormulaError("unassigned variable '" + t.var + "'");
    return it->second;
  }
  if (t.index < 0 || static_cast<std::size_t>(t.index) >= consts.size()) {
    throw FormulaError("constant $" + std::to_string(t.index) + " out of range");
  }
  return consts[t.index];
}

bool eval(const Formula& f, const FiniteStructure& s, std::map<std::string, int>& env, std::span<const int> consts) {
  switch (f->op) {
    case Op::Member:
      return s.in[lookup(f->lhs, env, consts)][lookup(f->rhs, env, consts)];
    case Op::Equal:
      return lookup(f->lhs, env, consts) == lookup(f->rhs, env, consts);
    case Op::Not:
      return !eval(f->a, s, env, consts);
    case Op::And:
      return eval(f->a, s, env, consts) && eval(f->b, s, env, consts);
    case Op::Or:
      return eval(f->a, s, env, consts) || eval(f->b, s, env, consts);
    case Op::Implies:
      return !eval(f->a, s, env, consts) || eval(f->b, s, env, consts);
    case Op::Exists: {
      auto saved = env.find(f->var);
      std::optional<int> old;
      if (saved != env.end()) old = saved->second;
      bool found = false;
      for (std::size_t x = 0; x < s.size && !found; ++x) {
        env[f->var] = static_cast<int>(x);
        found = eval(f->a, s, env, consts);
      }
      if (old) {
        env[f->var] = *old;
      } else {
        env.erase(f->var);
      }
      return found;
    }
  }
  return false;
}

}  // namespace

bool holds(const Formula& f, const FiniteStructure& s, const std::map<std::string, int>& assignment,
           std::span<const int> consts) {
  std::map<std::string, int> env = assignment;
  return eval(f, s, env, consts);
}

std::vector<int> witnesses(const Formula& f, const std::string& v, const FiniteStructure& s) {
  auto fv = free_variables(f);
  fv.erase(v);
  if (!fv.empty()) throw FormulaError("formula has free variables besides '" + v + "'");
  std::vector<int> out;
  for (std::size_t x = 0; x < s.size; ++x) {
    if (holds(f, s, {{v, static_cast<int>(x)}})) out.push_back(static_cast<int>(x));
  }
  return out;
}

}  // namespace forcinglab
