#pragma once

#include "datamon/rational.hpp"
#include "datamon/signature.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace datamon {

enum class TermKind {
  var,  ///< state variable, current instant
  prev, ///< lookback variable: value of the variable at the previous instant
  app,  ///< function application, constants included (arity 0)
  num,  ///< numeric literal
};

struct TermNode;

/// Immutable, shared term. Equality and ordering go through the canonical key,
/// which is also the printed s-expression.
class Term {
public:
  static Term variable(const std::string& name, SortId sort);
  static Term previous(const std::string& name, SortId sort);
  static Term apply(const std::string& fn, std::vector<Term> args, SortId sort);
  static Term number(const Rational& value, SortId sort);

  TermKind kind() const;
  const std::string& name() const;
  SortId sort() const;
  const std::vector<Term>& args() const;
  const Rational& value() const;
  const std::string& key() const;
  std::size_t size() const;

  bool is_variable() const { return kind() == TermKind::var || kind() == TermKind::prev; }
  /// Built-in linear arithmetic ("+", "-", "*"); only the external backend reasons about these.
  bool is_arith_builtin() const;
  bool mentions_prev() const;

  /// Visits every variable occurrence (current and lookback).
  void for_each_variable(const std::function<void(const Term&)>& fn) const;

  bool operator==(const Term& other) const { return key() == other.key(); }
  bool operator!=(const Term& other) const { return !(*this == other); }
  bool operator<(const Term& other) const { return key() < other.key(); }

private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  TermKind kind;
  std::string name;
  SortId sort;
  std::vector<Term> args;
  Rational value;
  std::string key;
  std::size_t size = 1;
  bool has_prev = false;
};

bool is_arith_builtin_name(const std::string& name);

enum class AtomKind { eq, lt, le, pred };

/// p(t1..tk), t1 = t2, t1 < t2 or t1 <= t2. Equality arguments are kept sorted.
class Atom {
public:
  static Atom equal(Term a, Term b);
  static Atom less(Term a, Term b);
  static Atom less_equal(Term a, Term b);
  static Atom predicate(const std::string& name, std::vector<Term> args);

  AtomKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  const std::string& key() const { return key_; }
  bool mentions_prev() const;
  bool is_order() const { return kind_ == AtomKind::lt || kind_ == AtomKind::le; }

  bool operator==(const Atom& o) const { return key_ == o.key_; }
  bool operator<(const Atom& o) const { return key_ < o.key_; }

private:
  Atom(AtomKind kind, std::string name, std::vector<Term> args);
  AtomKind kind_;
  std::string name_;
  std::vector<Term> args_;
  std::string key_;
};

/// Atom or negated atom. Negated order atoms are rewritten to the converse
/// order atom, so an order literal is always positive.
class Literal {
public:
  Literal(Atom atom, bool positive);

  const Atom& atom() const { return atom_; }
  bool positive() const { return positive_; }
  const std::string& key() const { return key_; }
  Literal negated() const;
  bool mentions_prev() const { return atom_.mentions_prev(); }
  /// Truth value when decidable syntactically (t = t, numeral comparisons).
  std::optional<bool> trivial_value() const;

  bool operator==(const Literal& o) const { return key_ == o.key_; }
  bool operator!=(const Literal& o) const { return key_ != o.key_; }
  bool operator<(const Literal& o) const { return key_ < o.key_; }

private:
  Atom atom_;
  bool positive_;
  std::string key_;
};

enum class FormulaKind { truth, falsity, literal, conj, disj };

struct FormulaNode;

/// Quantifier-free first-order formula in negation normal form. Conjunctions
/// and disjunctions are flattened, sorted by key and deduplicated.
class Formula {
public:
  static Formula top();
  static Formula bottom();
  static Formula lit(const Literal& l);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula conj_of(const std::vector<Literal>& lits);

  FormulaKind kind() const;
  const Literal& literal() const;
  const std::vector<Formula>& children() const;
  const std::string& key() const;
  bool is_top() const { return kind() == FormulaKind::truth; }
  bool is_bottom() const { return kind() == FormulaKind::falsity; }

  /// Collects the literals occurring anywhere in the formula.
  void collect_literals(std::vector<Literal>& out) const;
  bool mentions_prev() const;
  std::set<std::string> variable_keys() const;

  bool operator==(const Formula& o) const { return key() == o.key(); }
  bool operator<(const Formula& o) const { return key() < o.key(); }

private:
  static Formula junction(std::vector<Formula> parts, bool is_conj);
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  FormulaKind kind;
  std::optional<Literal> lit;
  std::vector<Formula> children;
  std::string key;
};

/// Negation pushed to the literals.
Formula negate(const Formula& f);

/// Simultaneous replacement of variables. Keys are variable keys: "x" for the
/// current value and "(prev x)" for the lookback value.
class Substitution {
public:
  void add(const Term& var, const Term& replacement);
  bool empty() const { return map_.empty(); }
  const Term* find(const std::string& var_key) const;

private:
  std::map<std::string, Term> map_;
};

Term substitute(const Term& t, const Substitution& s);
Literal substitute(const Literal& l, const Substitution& s);
Formula substitute(const Formula& f, const Substitution& s);

} // namespace datamon
