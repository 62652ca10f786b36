#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace datamon {

using SortId = int;

enum class SortKind { uninterpreted, rational, integer };

struct SortDecl {
  std::string name;
  SortKind kind = SortKind::uninterpreted;
};

/// Function symbol; arity 0 declares a constant.
struct FunctionDecl {
  std::string name;
  std::vector<SortId> args;
  SortId result = -1;
};

struct PredicateDecl {
  std::string name;
  std::vector<SortId> args;
};

struct VariableDecl {
  std::string name;
  SortId sort = -1;
};

/// Multi-sorted vocabulary: sorts, function and predicate symbols, and the
/// monitored state variables. Equality is implicit at every sort.
class Signature {
public:
  SortId add_sort(const std::string& name, SortKind kind = SortKind::uninterpreted);
  void add_function(const std::string& name, std::vector<SortId> args, SortId result);
  void add_predicate(const std::string& name, std::vector<SortId> args);
  void add_variable(const std::string& name, SortId sort);

  /// Throws TypeError when an invariant is violated (e.g. no variables).
  void validate() const;

  const std::vector<SortDecl>& sorts() const { return sorts_; }
  const std::vector<FunctionDecl>& functions() const { return functions_; }
  const std::vector<PredicateDecl>& predicates() const { return predicates_; }
  const std::vector<VariableDecl>& variables() const { return variables_; }

  std::optional<SortId> find_sort(const std::string& name) const;
  const FunctionDecl* find_function(const std::string& name) const;
  const PredicateDecl* find_predicate(const std::string& name) const;
  const VariableDecl* find_variable(const std::string& name) const;

  const SortDecl& sort(SortId id) const { return sorts_.at(static_cast<std::size_t>(id)); }
  const std::string& sort_name(SortId id) const { return sort(id).name; }
  bool is_arithmetic(SortId id) const { return sort(id).kind != SortKind::uninterpreted; }

  /// First declared sort of the given kind, used to type bare numerals.
  std::optional<SortId> first_sort_of(SortKind kind) const;

  /// Stable textual form; parses back to an equal signature.
  std::string to_text() const;

private:
  bool name_taken(const std::string& name) const;

  std::vector<SortDecl> sorts_;
  std::vector<FunctionDecl> functions_;
  std::vector<PredicateDecl> predicates_;
  std::vector<VariableDecl> variables_;
  std::map<std::string, SortId> sort_index_;
  std::map<std::string, std::size_t> function_index_;
  std::map<std::string, std::size_t> predicate_index_;
  std::map<std::string, std::size_t> variable_index_;
};

} // namespace datamon
