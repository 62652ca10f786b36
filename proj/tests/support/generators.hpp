#pragma once

// Random properties, finite models and traces for property-based tests.

#include "datamon/automaton.hpp"
#include "datamon/parser.hpp"
#include "datamon/trace.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <random>
#include <string>
#include <vector>

namespace gen {

using namespace datamon;

/// Random property over a pool of atoms: at most max_atoms leaves and
/// temporal depth at most max_depth.
class PropertyGen {
public:
  PropertyGen(std::vector<Property> atoms, int max_depth, int max_atoms)
      : atoms_(std::move(atoms)), max_depth_(max_depth), max_atoms_(max_atoms) {}

  Property operator()(std::mt19937& rng) {
    int leaves = std::uniform_int_distribution<int>(1, max_atoms_)(rng);
    return build(rng, leaves, max_depth_);
  }

  /// Resamples until the automaton has safe lookback.
  Property safe(std::mt19937& rng) {
    for (;;) {
      Property p = (*this)(rng);
      if (check_safe_lookback(build_nfa(p, NfaOptions{{Pruning::syntactic, nullptr}, 10000}))) return p;
    }
  }

private:
  Property build(std::mt19937& rng, int leaves, int depth) {
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    if (leaves == 1 && (depth == 0 || pick(3) == 0)) {
      Property a = atoms_[static_cast<std::size_t>(pick(static_cast<int>(atoms_.size())))];
      return pick(2) ? a : negate(a);
    }
    if (leaves == 1 || (depth > 0 && pick(3) == 0)) {
      Property c = build(rng, leaves, depth - 1);
      switch (pick(4)) {
      case 0: return Property::next(c);
      case 1: return Property::weak_next(c);
      case 2: return Property::eventually(c);
      default: return Property::always(c);
      }
    }
    int left = std::uniform_int_distribution<int>(1, leaves - 1)(rng);
    int op = depth > 0 ? pick(4) : pick(2);
    int d = op >= 2 ? depth - 1 : depth;
    Property a = build(rng, left, d), b = build(rng, leaves - left, d);
    switch (op) {
    case 0: return Property::conj(a, b);
    case 1: return Property::disj(a, b);
    case 2: return Property::until(a, b);
    default: return Property::release(a, b);
    }
  }

  std::vector<Property> atoms_;
  int max_depth_;
  int max_atoms_;
};

/// Random total fact base over uninterpreted sorts with `size` elements each.
inline FactBase random_model(const Signature& sig, int size, std::mt19937& rng, const std::string& prefix = "e") {
  FactBase fb(sig);
  std::map<SortId, std::vector<Value>> carrier;
  for (std::size_t s = 0; s < sig.sorts().size(); ++s)
    for (int i = 0; i < size; ++i) {
      auto name = prefix + std::to_string(s) + "_" + std::to_string(i);
      fb.add_element(static_cast<SortId>(s), name);
      carrier[static_cast<SortId>(s)].push_back(Value::element(static_cast<SortId>(s), name));
    }
  auto any = [&](SortId s) {
    const auto& c = carrier[s];
    return c[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)];
  };
  for (const auto& f : sig.functions()) {
    std::vector<Value> args;
    std::function<void(std::size_t)> fill = [&](std::size_t i) {
      if (i == f.args.size()) {
        fb.set_function(f.name, args, any(f.result));
        return;
      }
      for (const auto& v : carrier[f.args[i]]) {
        args.push_back(v);
        fill(i + 1);
        args.pop_back();
      }
    };
    fill(0);
  }
  for (const auto& p : sig.predicates()) {
    std::vector<Value> args;
    std::function<void(std::size_t)> fill = [&](std::size_t i) {
      if (i == p.args.size()) {
        if (rng() % 2) fb.set_predicate(p.name, args, true);
        return;
      }
      for (const auto& v : carrier[p.args[i]]) {
        args.push_back(v);
        fill(i + 1);
        args.pop_back();
      }
    };
    fill(0);
    fb.close_predicate(p.name);
  }
  return fb;
}

/// All assignments of the state variables over the declared elements.
inline std::vector<Assignment> all_assignments(const FactBase& fb) {
  const auto& sig = fb.signature();
  std::vector<Assignment> out{{}};
  for (const auto& v : sig.variables()) {
    std::vector<Assignment> next;
    for (const auto& a : out)
      for (const auto& e : fb.elements(v.sort)) {
        Assignment b = a;
        b[v.name] = Value::element(v.sort, e);
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  return out;
}

inline Trace random_trace(const FactBase& fb, int length, std::mt19937& rng) {
  auto all = all_assignments(fb);
  Trace tr{fb, {}};
  for (int i = 0; i < length; ++i) tr.steps.push_back(all[rng() % all.size()]);
  return tr;
}

/// The fact base plus `fresh` new elements per uninterpreted sort, with
/// random function values and predicate facts on tuples touching them.
inline FactBase extend_model(const FactBase& fb, int fresh, std::mt19937& rng, const std::string& prefix) {
  const auto& sig = fb.signature();
  FactBase ext = fb;
  std::map<SortId, std::vector<Value>> carrier;
  std::set<std::string> added;
  for (std::size_t i = 0; i < sig.sorts().size(); ++i) {
    SortId s = static_cast<SortId>(i);
    if (sig.is_arithmetic(s)) continue;
    for (const auto& e : fb.elements(s)) carrier[s].push_back(Value::element(s, e));
    for (int k = 0; k < fresh; ++k) {
      auto name = prefix + std::to_string(s) + "_" + std::to_string(k);
      ext.add_element(s, name);
      added.insert(name);
      carrier[s].push_back(Value::element(s, name));
    }
  }
  auto touches = [&](const std::vector<Value>& args) {
    return std::any_of(args.begin(), args.end(), [&](const Value& v) { return added.count(v.name) > 0; });
  };
  auto each = [&](const std::vector<SortId>& sorts, const std::function<void(const std::vector<Value>&)>& fn) {
    std::vector<Value> cur;
    std::function<void()> rec = [&] {
      if (cur.size() == sorts.size()) {
        if (touches(cur)) fn(cur);
        return;
      }
      for (const auto& v : carrier[sorts[cur.size()]]) {
        cur.push_back(v);
        rec();
        cur.pop_back();
      }
    };
    rec();
  };
  for (const auto& f : sig.functions())
    each(f.args, [&](const std::vector<Value>& args) {
      const auto& c = carrier[f.result];
      ext.set_function(f.name, args, c[rng() % c.size()]);
    });
  for (const auto& p : sig.predicates())
    each(p.args, [&](const std::vector<Value>& args) {
      if (rng() % 2) ext.set_predicate(p.name, args, true);
    });
  return ext;
}

} // namespace gen
