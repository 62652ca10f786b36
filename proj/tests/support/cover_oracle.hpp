#pragma once

// Extension-model oracle for covers: decides whether a conjunction can be
// satisfied in some extension of a finite structure by choosing values for
// the eliminated variables, new elements, and function/predicate values on
// new elements. Rational values are drawn from insertion points around the
// values already in play, which realizes every order type.

#include "datamon/errors.hpp"
#include "datamon/theory.hpp"
#include "datamon/trace.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using namespace datamon;

class ExtensionSearch {
public:
  /// old_numbers: carrier of each arithmetic sort in the base structure;
  /// defaults to the numbers mentioned by its facts and the environment.
  ExtensionSearch(const FactBase& base, const Environment& env, const std::set<std::string>& eliminated,
                  std::map<SortId, std::set<Rational>> old_numbers = {})
      : base_(base), env_(env), eliminated_(eliminated), old_(std::move(old_numbers)) {
    const auto& sig = base.signature();
    for (std::size_t i = 0; i < sig.sorts().size(); ++i) {
      SortId s = static_cast<SortId>(i);
      if (!sig.is_arithmetic(s)) continue;
      auto nums = base.numbers(s);
      old_[s].insert(nums.begin(), nums.end());
      for (const auto& [k, v] : env)
        if (v.sort == s && v.number) old_[s].insert(*v.number);
    }
  }

  /// Some extension and witnesses satisfy every literal.
  bool satisfiable(const std::vector<Literal>& lits, long budget = 2000000) {
    budget_ = budget;
    lits_ = lits;
    for (const auto& l : lits)
      for (const auto& t : l.atom().args()) collect_numbers(t);
    return search(0);
  }

private:
  struct Choice {
    std::map<std::string, Value> vars;
    std::map<std::pair<std::string, std::vector<Value>>, Value> funs;
    std::map<std::pair<std::string, std::vector<Value>>, bool> preds;
    std::map<SortId, int> fresh;
  };

  void collect_numbers(const Term& t) {
    if (t.kind() == TermKind::num) numerals_[t.sort()].insert(t.value());
    for (const auto& a : t.args()) collect_numbers(a);
  }

  bool is_new(const Value& v) const { return !v.number && v.name.rfind("new!", 0) == 0; }

  std::vector<Value> candidates(SortId sort) const {
    const auto& sig = base_.signature();
    std::vector<Value> out;
    if (sig.is_arithmetic(sort)) {
      std::set<Rational> pts = old_.count(sort) ? old_.at(sort) : std::set<Rational>{};
      if (auto it = numerals_.find(sort); it != numerals_.end()) pts.insert(it->second.begin(), it->second.end());
      for (const auto& [k, v] : env_)
        if (v.sort == sort && v.number) pts.insert(*v.number);
      for (const auto& [k, v] : choice_.vars)
        if (v.sort == sort && v.number) pts.insert(*v.number);
      for (const auto& [k, v] : choice_.funs)
        if (v.sort == sort && v.number) pts.insert(*v.number);
      if (pts.empty()) pts.insert(0);
      std::vector<Rational> sorted(pts.begin(), pts.end());
      out.push_back(Value::numeric(sort, sorted.front() - 1));
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.push_back(Value::numeric(sort, sorted[i]));
        if (i + 1 < sorted.size()) out.push_back(Value::numeric(sort, (sorted[i] + sorted[i + 1]) / 2));
      }
      out.push_back(Value::numeric(sort, sorted.back() + 1));
      return out;
    }
    for (const auto& e : base_.elements(sort)) out.push_back(Value::element(sort, e));
    int used = 0;
    if (auto it = choice_.fresh.find(sort); it != choice_.fresh.end()) used = it->second;
    for (int i = 0; i <= used; ++i) out.push_back(Value::element(sort, "new!" + std::to_string(sort) + "!" + std::to_string(i)));
    return out;
  }

  void take(const Value& v) {
    if (!is_new(v)) return;
    int idx = std::stoi(v.name.substr(v.name.rfind('!') + 1));
    int& used = choice_.fresh[v.sort];
    used = std::max(used, idx + 1);
  }

  /// Evaluates a term; when a value must be chosen, returns the pending
  /// decision instead.
  struct Pending {
    enum { none, var, fun } kind = none;
    std::string name;
    std::vector<Value> args;
    SortId sort = -1;
  };

  std::optional<Value> eval(const Term& t, Pending& pending) {
    switch (t.kind()) {
    case TermKind::num: return Value::numeric(t.sort(), t.value());
    case TermKind::var:
    case TermKind::prev: {
      if (auto it = choice_.vars.find(t.key()); it != choice_.vars.end()) return it->second;
      if (!eliminated_.count(t.key())) return env_.at(t.key());
      pending = {Pending::var, t.key(), {}, t.sort()};
      return std::nullopt;
    }
    case TermKind::app: break;
    }
    std::vector<Value> args;
    for (const auto& a : t.args()) {
      auto v = eval(a, pending);
      if (!v) return std::nullopt;
      args.push_back(*v);
    }
    if (t.is_arith_builtin()) {
      Rational r = *args[0].number;
      if (t.name() == "-" && args.size() == 1) r = -r;
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (t.name() == "+") r += *args[i].number;
        else if (t.name() == "-") r -= *args[i].number;
        else r *= *args[i].number;
      }
      return Value::numeric(t.sort(), r);
    }
    if (auto v = base_.function_value(t.name(), args)) return *v;
    auto key = std::make_pair(t.name(), args);
    if (auto it = choice_.funs.find(key); it != choice_.funs.end()) return it->second;
    pending = {Pending::fun, t.name(), args, t.sort()};
    return std::nullopt;
  }

  bool search(std::size_t i) {
    if (--budget_ < 0) throw ResourceError("oracle budget exhausted");
    if (i == lits_.size()) return true;
    const auto& l = lits_[i];
    Pending pending;
    std::vector<Value> vals;
    for (const auto& t : l.atom().args()) {
      auto v = eval(t, pending);
      if (!v) break;
      vals.push_back(*v);
    }
    if (pending.kind != Pending::none) {
      for (const auto& c : candidates(pending.sort)) {
        Choice saved = choice_;
        take(c);
        if (pending.kind == Pending::var) choice_.vars[pending.name] = c;
        else choice_.funs[{pending.name, pending.args}] = c;
        if (search(i)) return true;
        choice_ = saved;
      }
      return false;
    }
    const auto& a = l.atom();
    bool holds = false;
    switch (a.kind()) {
    case AtomKind::eq: holds = vals[0] == vals[1]; break;
    case AtomKind::lt: holds = *vals[0].number < *vals[1].number; break;
    case AtomKind::le: holds = *vals[0].number <= *vals[1].number; break;
    case AtomKind::pred: {
      bool touches_new = false;
      for (const auto& v : vals) touches_new = touches_new || is_new(v) || (v.number && !old_number(v));
      if (!touches_new) {
        holds = base_.predicate_value(a.name(), vals) == Truth::true_;
        break;
      }
      auto key = std::make_pair(a.name(), vals);
      auto it = choice_.preds.find(key);
      if (it == choice_.preds.end()) {
        choice_.preds[key] = l.positive();
        if (search(i + 1)) return true;
        choice_.preds.erase(key);
        return false;
      }
      holds = it->second;
      break;
    }
    }
    if (holds != l.positive()) return false;
    return search(i + 1);
  }

  bool old_number(const Value& v) const {
    auto it = old_.find(v.sort);
    return it != old_.end() && it->second.count(*v.number) > 0;
  }

  const FactBase& base_;
  const Environment& env_;
  const std::set<std::string>& eliminated_;
  std::map<SortId, std::set<Rational>> old_;
  std::vector<Literal> lits_;
  std::map<SortId, std::set<Rational>> numerals_;
  Choice choice_;
  long budget_ = 0;
};

/// exists ys. (disjunction of conjunctions) in some extension of the structure.
inline bool extension_satisfiable(const FactBase& base, const Environment& env, const std::set<std::string>& eliminated,
                                  const std::vector<std::vector<Literal>>& dnf,
                                  const std::map<SortId, std::set<Rational>>& old_numbers = {}) {
  for (const auto& conj : dnf) {
    ExtensionSearch s(base, env, eliminated, old_numbers);
    if (s.satisfiable(conj)) return true;
  }
  return false;
}

/// Assignments of the surviving variables on which cover and exists ys. f
/// disagree in the given model.
inline std::size_t cover_mismatches_in(const FiniteModel& m, const std::vector<std::string>& ys,
                                       const std::vector<std::vector<Literal>>& dnf, const Formula& cover) {
  const auto& sig = m.facts.signature();
  std::set<std::string> elim(ys.begin(), ys.end());
  std::vector<VariableDecl> survivors;
  for (const auto& v : sig.variables())
    if (!elim.count(v.name)) survivors.push_back(v);
  std::size_t bad = 0;
  std::function<void(std::size_t, Environment&)> assign = [&](std::size_t i, Environment& env) {
    if (i == survivors.size()) {
      bool lhs = eval_ground(cover, m.facts, env) == Truth::true_;
      if (lhs != extension_satisfiable(m.facts, env, elim, dnf)) ++bad;
      return;
    }
    for (const auto& v : m.carrier.at(survivors[i].sort)) {
      env[survivors[i].name] = v;
      assign(i + 1, env);
    }
    env.erase(survivors[i].name);
  };
  Environment env;
  assign(0, env);
  return bad;
}

/// Disagreements over every model of carrier size at most size_bound. Throws
/// ResourceError when one size combination exceeds max_models.
inline std::size_t cover_mismatches(const Signature& sig, const std::vector<std::string>& ys, const Formula& f,
                                    const Formula& cover, int size_bound, std::size_t max_models = 10000000) {
  auto dnf = to_dnf(f);
  std::size_t bad = 0;
  enumerate_models_up_to(
      sig, size_bound,
      [&](const FiniteModel& m) {
        bad += cover_mismatches_in(m, ys, dnf, cover);
        return true;
      },
      max_models);
  return bad;
}

} // namespace oracle
