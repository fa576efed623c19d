#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace forcinglab {

/// A variable or a name constant `$k` (the k-th name of the active universe).
struct Term {
  enum class Kind { Var, Const };
  Kind kind = Kind::Var;
  std::string var;
  int index = -1;

  static Term variable(std::string v) { return Term{Kind::Var, std::move(v), -1}; }
  static Term constant(int k) { return Term{Kind::Const, {}, k}; }
  bool is_var() const { return kind == Kind::Var; }
  friend bool operator==(const Term&, const Term&) = default;
};

enum class Op { Member, Equal, Not, And, Or, Implies, Exists };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

/// Immutable AST node. Universal quantifiers are stored as !exists!.
struct FormulaNode {
  Op op;
  Term lhs, rhs;    // Member, Equal
  std::string var;  // Exists
  Formula a, b;     // Not/Exists use a; binary connectives use a and b
};

Formula member(Term x, Term y);
Formula equal(Term x, Term y);
Formula negate(Formula f);
Formula conj(Formula f, Formula g);
Formula disj(Formula f, Formula g);
Formula implies(Formula f, Formula g);
Formula exists(std::string v, Formula f);
Formula forall(std::string v, Formula f);

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::invalid_argument(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class FormulaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ParseOptions {
  /// Reject formulas with free variables (FormulaError naming them).
  bool require_closed = false;
};

/// Grammar: atoms `t in t`, `t = t`; `!`, `&`, `|`, `->` (binding tightest to
/// loosest, `->` right associative); `exists v (...)`, `forall v (...)`;
/// terms are identifiers or `$k`.
Formula parse_formula(std::string_view text, ParseOptions opts = {});

/// Fully parenthesized canonical text; parse(print(f)) == f.
std::string to_string(const Formula& f);

bool same_formula(const Formula& f, const Formula& g);

std::set<std::string> free_variables(const Formula& f);
/// Constants $k occurring in f.
std::set<int> constants(const Formula& f);
/// Nesting depth counting atoms as depth 1.
int depth(const Formula& f);
bool quantifier_free(const Formula& f);

/// Replaces free occurrences of `var` by the constant $k. Throws FormulaError
/// if `var` is bound anywhere in f.
Formula substitute(const Formula& f, const std::string& var, int k);

/// A finite structure (D, E) with D = {0..size-1} and E the membership
/// relation: in[x][y] means x E y.
struct FiniteStructure {
  std::size_t size = 0;
  std::vector<std::vector<bool>> in;
};

/// Truth in a finite structure. Constants $k denote elements constants[k].
bool holds(const Formula& f, const FiniteStructure& s, const std::map<std::string, int>& assignment,
           std::span<const int> constants = {});

/// Elements x with s |= f[v := x]; f must have at most the free variable v.
std::vector<int> witnesses(const Formula& f, const std::string& v, const FiniteStructure& s);

}  // namespace forcinglab
