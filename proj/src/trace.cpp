#include "datamon/trace.hpp"

#include "datamon/errors.hpp"

#include <algorithm>
#include <functional>

namespace datamon {

Truth truth_not(Truth t) {
  if (t == Truth::unknown) return t;
  return t == Truth::true_ ? Truth::false_ : Truth::true_;
}

Truth truth_and(Truth a, Truth b) {
  if (a == Truth::false_ || b == Truth::false_) return Truth::false_;
  if (a == Truth::unknown || b == Truth::unknown) return Truth::unknown;
  return Truth::true_;
}

Truth truth_or(Truth a, Truth b) { return truth_not(truth_and(truth_not(a), truth_not(b))); }

const char* to_string(Truth t) {
  switch (t) {
  case Truth::true_: return "true";
  case Truth::false_: return "false";
  case Truth::unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------- FactBase

void FactBase::add_element(SortId sort, const std::string& name) {
  if (sig_->is_arithmetic(sort)) throw TypeError("elements of arithmetic sort are numerals: " + name);
  auto it = element_sorts_.find(name);
  if (it != element_sorts_.end()) {
    if (it->second != sort) throw TypeError("element " + name + " declared at two sorts");
    return;
  }
  element_sorts_[name] = sort;
  elements_[sort].push_back(name);
}

const std::vector<std::string>& FactBase::elements(SortId sort) const {
  static const std::vector<std::string> none;
  auto it = elements_.find(sort);
  return it == elements_.end() ? none : it->second;
}

Value FactBase::value_of(SortId sort, const std::string& text) const {
  if (sig_->is_arithmetic(sort)) {
    auto r = parse_rational(text);
    if (!r) throw TypeError("expected a number of sort " + sig_->sort_name(sort) + ", found " + text);
    if (sig_->sort(sort).kind == SortKind::integer && boost::multiprecision::denominator(*r) != 1)
      throw TypeError("non-integer value at integer sort: " + text);
    return Value::numeric(sort, *r);
  }
  auto it = element_sorts_.find(text);
  if (it == element_sorts_.end()) throw TypeError("undeclared element: " + text);
  if (it->second != sort)
    throw TypeError("element " + text + " has sort " + sig_->sort_name(it->second) + ", expected " + sig_->sort_name(sort));
  return Value::element(sort, text);
}

namespace {

void check_args(const Signature& sig, const std::string& sym, const std::vector<SortId>& sorts,
                const std::vector<Value>& args) {
  if (sorts.size() != args.size()) throw TypeError("wrong number of arguments in fact for " + sym);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i].sort != sorts[i])
      throw TypeError("argument " + args[i].key() + " of " + sym + " is not of sort " + sig.sort_name(sorts[i]));
}

} // namespace

void FactBase::set_function(const std::string& fn, std::vector<Value> args, Value result) {
  const auto* decl = sig_->find_function(fn);
  if (!decl) throw TypeError("unknown function in fact: " + fn);
  check_args(*sig_, fn, decl->args, args);
  if (result.sort != decl->result) throw TypeError("value of " + fn + " is not of sort " + sig_->sort_name(decl->result));
  auto& table = functions_[fn];
  auto [it, inserted] = table.emplace(std::move(args), result);
  if (!inserted && it->second != result) throw TypeError("conflicting facts for " + fn);
}

void FactBase::set_predicate(const std::string& pred, std::vector<Value> args, bool holds) {
  const auto* decl = sig_->find_predicate(pred);
  if (!decl) throw TypeError("unknown predicate in fact: " + pred);
  check_args(*sig_, pred, decl->args, args);
  auto& table = predicates_[pred];
  auto [it, inserted] = table.emplace(std::move(args), holds);
  if (!inserted && it->second != holds) throw TypeError("conflicting facts for " + pred);
}

std::optional<Value> FactBase::function_value(const std::string& fn, const std::vector<Value>& args) const {
  auto t = functions_.find(fn);
  if (t == functions_.end()) return std::nullopt;
  auto it = t->second.find(args);
  if (it == t->second.end()) return std::nullopt;
  return it->second;
}

Truth FactBase::predicate_value(const std::string& pred, const std::vector<Value>& args) const {
  if (auto t = predicates_.find(pred); t != predicates_.end())
    if (auto it = t->second.find(args); it != t->second.end()) return it->second ? Truth::true_ : Truth::false_;
  return is_closed(pred) ? Truth::false_ : Truth::unknown;
}

std::set<Rational> FactBase::numbers(SortId sort) const {
  std::set<Rational> out;
  auto note = [&](const Value& v) {
    if (v.sort == sort && v.number) out.insert(*v.number);
  };
  for (const auto& [fn, table] : functions_)
    for (const auto& [args, v] : table) {
      for (const auto& a : args) note(a);
      note(v);
    }
  for (const auto& [p, table] : predicates_)
    for (const auto& [args, h] : table)
      for (const auto& a : args) note(a);
  return out;
}

// ---------------------------------------------------------------- evaluation

Environment make_environment(const Assignment* prev, const Assignment& curr) {
  Environment env = curr;
  if (prev)
    for (const auto& [v, val] : *prev) env.emplace("(prev " + v + ")", val);
  return env;
}

TermValue eval_term(const Term& t, const FactBase& facts, const Environment& env) {
  using S = TermValue::Status;
  switch (t.kind()) {
  case TermKind::var:
  case TermKind::prev: {
    auto it = env.find(t.key());
    if (it != env.end()) return {S::defined, it->second};
    if (t.kind() == TermKind::prev) return {S::undefined, {}};
    return {S::unknown, {}};
  }
  case TermKind::num: return {S::defined, Value::numeric(t.sort(), t.value())};
  case TermKind::app: break;
  }
  std::vector<Value> args;
  S worst = S::defined;
  for (const auto& a : t.args()) {
    auto v = eval_term(a, facts, env);
    if (v.status == S::undefined) return v;
    if (v.status == S::unknown) worst = S::unknown;
    args.push_back(v.value);
  }
  if (worst == S::unknown) return {S::unknown, {}};
  if (t.is_arith_builtin()) {
    Rational r = *args[0].number;
    if (t.name() == "-" && args.size() == 1) r = -r;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (t.name() == "+") r += *args[i].number;
      else if (t.name() == "-") r -= *args[i].number;
      else r *= *args[i].number;
    }
    return {S::defined, Value::numeric(t.sort(), r)};
  }
  if (auto v = facts.function_value(t.name(), args)) return {S::defined, *v};
  return {S::unknown, {}};
}

namespace {

/// Value name, or the application over known argument values when the
/// function value itself is missing; equal shapes denote equal values.
std::optional<std::string> shape(const Term& t, const FactBase& facts, const Environment& env) {
  auto v = eval_term(t, facts, env);
  if (v.status == TermValue::Status::defined) return v.value.key();
  if (v.status == TermValue::Status::undefined || t.kind() != TermKind::app) return std::nullopt;
  std::string out = "(" + t.name();
  for (const auto& a : t.args()) {
    auto s = shape(a, facts, env);
    if (!s) return std::nullopt;
    out += " " + *s;
  }
  return out + ")";
}

} // namespace

Truth eval_ground(const Literal& l, const FactBase& facts, const Environment& env) {
  using S = TermValue::Status;
  const auto& atom = l.atom();
  std::vector<Value> vals;
  bool unknown = false;
  for (const auto& a : atom.args()) {
    auto v = eval_term(a, facts, env);
    if (v.status == S::undefined) return l.positive() ? Truth::false_ : Truth::true_;
    if (v.status == S::unknown) unknown = true;
    vals.push_back(v.value);
  }
  if (unknown) {
    if (atom.kind() == AtomKind::pred) return Truth::unknown;
    auto a = shape(atom.args()[0], facts, env), b = shape(atom.args()[1], facts, env);
    if (!a || !b || *a != *b) return Truth::unknown;
    Truth same = atom.kind() == AtomKind::lt ? Truth::false_ : Truth::true_;
    return l.positive() ? same : truth_not(same);
  }
  Truth t = Truth::unknown;
  switch (atom.kind()) {
  case AtomKind::eq: t = vals[0] == vals[1] ? Truth::true_ : Truth::false_; break;
  case AtomKind::lt: t = *vals[0].number < *vals[1].number ? Truth::true_ : Truth::false_; break;
  case AtomKind::le: t = *vals[0].number <= *vals[1].number ? Truth::true_ : Truth::false_; break;
  case AtomKind::pred: t = facts.predicate_value(atom.name(), vals); break;
  }
  return l.positive() ? t : truth_not(t);
}

Truth eval_ground(const Formula& f, const FactBase& facts, const Environment& env) {
  switch (f.kind()) {
  case FormulaKind::truth: return Truth::true_;
  case FormulaKind::falsity: return Truth::false_;
  case FormulaKind::literal: return eval_ground(f.literal(), facts, env);
  case FormulaKind::conj: {
    Truth r = Truth::true_;
    for (const auto& c : f.children()) {
      r = truth_and(r, eval_ground(c, facts, env));
      if (r == Truth::false_) break;
    }
    return r;
  }
  case FormulaKind::disj: {
    Truth r = Truth::false_;
    for (const auto& c : f.children()) {
      r = truth_or(r, eval_ground(c, facts, env));
      if (r == Truth::true_) break;
    }
    return r;
  }
  }
  return Truth::unknown;
}

bool eval_semantics(const Trace& tr, const Property& p) {
  const std::size_t n = tr.steps.size();
  if (n == 0) throw Error("trace must have positive length");
  std::vector<Environment> envs;
  for (std::size_t i = 0; i < n; ++i) envs.push_back(make_environment(i ? &tr.steps[i - 1] : nullptr, tr.steps[i]));
  std::map<std::pair<std::string, std::size_t>, Truth> memo;
  std::optional<std::pair<std::string, std::size_t>> missing;
  std::function<Truth(const Property&, std::size_t)> sat = [&](const Property& q, std::size_t i) -> Truth {
    switch (q.kind()) {
    case PropKind::top: return Truth::true_;
    case PropKind::bottom: return Truth::false_;
    case PropKind::literal: {
      Truth t = eval_ground(q.literal(), tr.facts, envs[i]);
      if (t == Truth::unknown && !missing) missing = {q.literal().key(), i};
      return t;
    }
    default: break;
    }
    auto key = std::make_pair(q.key(), i);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Truth r = Truth::unknown;
    const auto& c = q.children();
    switch (q.kind()) {
    case PropKind::conj:
      r = Truth::true_;
      for (const auto& x : c) r = truth_and(r, sat(x, i));
      break;
    case PropKind::disj:
      r = Truth::false_;
      for (const auto& x : c) r = truth_or(r, sat(x, i));
      break;
    case PropKind::next: r = i + 1 < n ? sat(c[0], i + 1) : Truth::false_; break;
    case PropKind::weak_next: r = i + 1 < n ? sat(c[0], i + 1) : Truth::true_; break;
    case PropKind::until: {
      Truth later = i + 1 < n ? sat(q, i + 1) : Truth::false_;
      r = truth_or(sat(c[1], i), truth_and(sat(c[0], i), later));
      break;
    }
    case PropKind::release: {
      Truth later = i + 1 < n ? sat(q, i + 1) : Truth::true_;
      r = truth_and(sat(c[1], i), truth_or(sat(c[0], i), later));
      break;
    }
    default: break;
    }
    memo[key] = r;
    return r;
  };
  // Deepest instants first, so the recursion through U/R stays shallow.
  for (std::size_t i = n; i-- > 0;) {
    std::function<void(const Property&)> warm = [&](const Property& q) {
      for (const auto& x : q.children()) warm(x);
      sat(q, i);
    };
    warm(p);
  }
  Truth t = sat(p, 0);
  if (t == Truth::unknown)
    throw InsufficientFacts("fact base does not determine " + missing->first + " at instant " +
                                std::to_string(missing->second),
                            missing->first);
  return t == Truth::true_;
}

} // namespace datamon
