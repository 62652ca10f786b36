#include "datamon/signature.hpp"

#include "datamon/errors.hpp"

#include <sstream>

namespace datamon {

bool Signature::name_taken(const std::string& name) const {
  return function_index_.count(name) || predicate_index_.count(name) || variable_index_.count(name);
}

SortId Signature::add_sort(const std::string& name, SortKind kind) {
  if (sort_index_.count(name)) throw TypeError("duplicate sort declaration: " + name);
  auto id = static_cast<SortId>(sorts_.size());
  sorts_.push_back({name, kind});
  sort_index_[name] = id;
  return id;
}

void Signature::add_function(const std::string& name, std::vector<SortId> args, SortId result) {
  if (name_taken(name)) throw TypeError("duplicate declaration: " + name);
  for (auto s : args)
    if (s < 0 || s >= static_cast<SortId>(sorts_.size())) throw TypeError("unknown argument sort in " + name);
  if (result < 0 || result >= static_cast<SortId>(sorts_.size())) throw TypeError("unknown result sort in " + name);
  function_index_[name] = functions_.size();
  functions_.push_back({name, std::move(args), result});
}

void Signature::add_predicate(const std::string& name, std::vector<SortId> args) {
  if (name_taken(name)) throw TypeError("duplicate declaration: " + name);
  for (auto s : args)
    if (s < 0 || s >= static_cast<SortId>(sorts_.size())) throw TypeError("unknown argument sort in " + name);
  predicate_index_[name] = predicates_.size();
  predicates_.push_back({name, std::move(args)});
}

void Signature::add_variable(const std::string& name, SortId sort) {
  if (name_taken(name)) throw TypeError("duplicate declaration: " + name);
  if (sort < 0 || sort >= static_cast<SortId>(sorts_.size())) throw TypeError("unknown sort of variable " + name);
  variable_index_[name] = variables_.size();
  variables_.push_back({name, sort});
}

void Signature::validate() const {
  if (variables_.empty()) throw TypeError("V must be nonempty: declare at least one monitored variable");
}

std::optional<SortId> Signature::find_sort(const std::string& name) const {
  auto it = sort_index_.find(name);
  if (it == sort_index_.end()) return std::nullopt;
  return it->second;
}

const FunctionDecl* Signature::find_function(const std::string& name) const {
  auto it = function_index_.find(name);
  return it == function_index_.end() ? nullptr : &functions_[it->second];
}

const PredicateDecl* Signature::find_predicate(const std::string& name) const {
  auto it = predicate_index_.find(name);
  return it == predicate_index_.end() ? nullptr : &predicates_[it->second];
}

const VariableDecl* Signature::find_variable(const std::string& name) const {
  auto it = variable_index_.find(name);
  return it == variable_index_.end() ? nullptr : &variables_[it->second];
}

std::optional<SortId> Signature::first_sort_of(SortKind kind) const {
  for (std::size_t i = 0; i < sorts_.size(); ++i)
    if (sorts_[i].kind == kind) return static_cast<SortId>(i);
  return std::nullopt;
}

std::string Signature::to_text() const {
  std::ostringstream out;
  for (const auto& s : sorts_) {
    out << "(sort " << s.name;
    if (s.kind == SortKind::rational) out << " :rational";
    if (s.kind == SortKind::integer) out << " :integer";
    out << ")\n";
  }
  auto sorts_list = [&](const std::vector<SortId>& ids) {
    std::string r = "(";
    for (std::size_t i = 0; i < ids.size(); ++i) r += (i ? " " : "") + sort_name(ids[i]);
    return r + ")";
  };
  for (const auto& f : functions_) {
    if (f.args.empty())
      out << "(const " << f.name << " " << sort_name(f.result) << ")\n";
    else
      out << "(fun " << f.name << " " << sorts_list(f.args) << " " << sort_name(f.result) << ")\n";
  }
  for (const auto& p : predicates_) out << "(pred " << p.name << " " << sorts_list(p.args) << ")\n";
  for (const auto& v : variables_) out << "(var " << v.name << " " << sort_name(v.sort) << ")\n";
  return out.str();
}

} // namespace datamon
