#pragma once

#include "datamon/property.hpp"
#include "datamon/signature.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace datamon {

/// Domain element: a named element of an uninterpreted sort or a number of an
/// arithmetic sort. Distinct names denote distinct elements.
struct Value {
  SortId sort = -1;
  std::optional<Rational> number;
  std::string name;

  static Value element(SortId sort, std::string name) { return {sort, std::nullopt, std::move(name)}; }
  static Value numeric(SortId sort, const Rational& r) { return {sort, r, to_string(r)}; }

  const std::string& key() const { return name; }
  bool operator==(const Value& o) const { return sort == o.sort && name == o.name; }
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const { return sort != o.sort ? sort < o.sort : name < o.name; }
};

enum class Truth { false_, true_, unknown };

Truth truth_not(Truth t);
Truth truth_and(Truth a, Truth b);
Truth truth_or(Truth a, Truth b);
const char* to_string(Truth t);

/// Finite presentation of the relevant part of a first-order model: declared
/// elements, ground function values (constants included) and predicate facts.
/// Predicates listed as closed are false wherever no positive fact exists.
class FactBase {
public:
  explicit FactBase(const Signature& sig) : sig_(&sig) {}

  const Signature& signature() const { return *sig_; }

  void add_element(SortId sort, const std::string& name);
  bool has_element(const std::string& name) const { return element_sorts_.count(name) > 0; }
  const std::vector<std::string>& elements(SortId sort) const;
  /// Resolves an element name, or a numeral at an arithmetic sort.
  Value value_of(SortId sort, const std::string& text) const;

  void set_function(const std::string& fn, std::vector<Value> args, Value result);
  void set_predicate(const std::string& pred, std::vector<Value> args, bool holds);
  void close_predicate(const std::string& pred) { closed_.insert(pred); }
  bool is_closed(const std::string& pred) const { return closed_.count(pred) > 0; }

  std::optional<Value> function_value(const std::string& fn, const std::vector<Value>& args) const;
  Truth predicate_value(const std::string& pred, const std::vector<Value>& args) const;

  using FunctionTable = std::map<std::vector<Value>, Value>;
  using PredicateTable = std::map<std::vector<Value>, bool>;
  const std::map<std::string, FunctionTable>& function_facts() const { return functions_; }
  const std::map<std::string, PredicateTable>& predicate_facts() const { return predicates_; }
  const std::set<std::string>& closed_predicates() const { return closed_; }
  /// Every numeric value mentioned by a fact, per arithmetic sort.
  std::set<Rational> numbers(SortId sort) const;

private:
  const Signature* sig_;
  std::map<SortId, std::vector<std::string>> elements_;
  std::map<std::string, SortId> element_sorts_;
  std::map<std::string, FunctionTable> functions_;
  std::map<std::string, PredicateTable> predicates_;
  std::set<std::string> closed_;
};

/// Total map from state variables to values.
using Assignment = std::map<std::string, Value>;

struct Trace {
  FactBase facts;
  std::vector<Assignment> steps;
};

/// Values of current ("x") and lookback ("(prev x)") variables.
using Environment = std::map<std::string, Value>;

Environment make_environment(const Assignment* prev, const Assignment& curr);

/// Term evaluation: a value, "undefined" (a lookback variable at the first
/// instant), or unknown (a needed fact is missing).
struct TermValue {
  enum class Status { defined, undefined, unknown } status = Status::unknown;
  Value value;
};

TermValue eval_term(const Term& t, const FactBase& facts, const Environment& env);
/// Atoms over undefined terms are false.
Truth eval_ground(const Literal& l, const FactBase& facts, const Environment& env);
/// Strong Kleene connectives.
Truth eval_ground(const Formula& f, const FactBase& facts, const Environment& env);

/// Direct recursive implementation of finite-trace satisfaction at instant 0.
/// Throws InsufficientFacts when the fact base leaves an atom undetermined.
bool eval_semantics(const Trace& tr, const Property& p);

} // namespace datamon
