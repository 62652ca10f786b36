#pragma once

#include "datamon/term.hpp"

#include <memory>
#include <string>
#include <vector>

namespace datamon {

enum class PropKind { top, bottom, literal, conj, disj, next, weak_next, until, release };

struct PropNode;

/// Temporal property in negation normal form. Constructors simplify
/// (T & p -> p, F | p -> p, F & p -> F, T | p -> T) and keep boolean
/// children flattened and sorted, so the key identifies automaton states.
class Property {
public:
  static Property top();
  static Property bottom();
  static Property lit(const Literal& l);
  static Property conj(std::vector<Property> parts);
  static Property disj(std::vector<Property> parts);
  static Property conj(Property a, Property b) { return conj(std::vector<Property>{std::move(a), std::move(b)}); }
  static Property disj(Property a, Property b) { return disj(std::vector<Property>{std::move(a), std::move(b)}); }
  static Property next(Property p);
  static Property weak_next(Property p);
  static Property until(Property lhs, Property rhs);
  static Property release(Property lhs, Property rhs);
  static Property eventually(Property p) { return until(top(), std::move(p)); }
  static Property always(Property p) { return release(bottom(), std::move(p)); }

  PropKind kind() const;
  const Literal& literal() const;
  const std::vector<Property>& children() const;
  const std::string& key() const;
  bool is_top() const { return kind() == PropKind::top; }
  bool is_bottom() const { return kind() == PropKind::bottom; }

  /// Number of AST nodes, terms inside literals included.
  std::size_t size() const;
  /// Nesting depth of temporal operators.
  int temporal_depth() const;
  void collect_literals(std::vector<Literal>& out) const;

  bool operator==(const Property& o) const { return key() == o.key(); }
  bool operator<(const Property& o) const { return key() < o.key(); }

private:
  static Property junction(std::vector<Property> parts, bool is_conj);
  static Property temporal(PropKind k, std::vector<Property> children);
  explicit Property(std::shared_ptr<const PropNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const PropNode> node_;
};

struct PropNode {
  PropKind kind;
  std::optional<Literal> lit;
  std::vector<Property> children;
  std::string key;
  std::size_t size = 1;
};

/// C±: every literal of the property together with its negation, keyed and deduplicated.
std::vector<Literal> collect_constraints(const Property& p);

/// Negation normal form of the negated property (duals X/WX, U/R).
Property negate(const Property& p);

/// Propositional normal form: a disjunction of conjunctions whose leaves are
/// literals and temporal subformulas, without contradictory or subsumed
/// disjuncts. Returns the input unchanged past max_clauses.
Property boolean_normal_form(const Property& p, std::size_t max_clauses = 4096);

} // namespace datamon
