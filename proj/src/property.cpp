#include "datamon/property.hpp"

#include <algorithm>
#include <iterator>
#include <optional>
#include <map>
#include <set>

namespace datamon {

namespace {

std::shared_ptr<PropNode> make_prop(PropKind k) {
  auto n = std::make_shared<PropNode>();
  n->kind = k;
  return n;
}

const char* op_name(PropKind k) {
  switch (k) {
  case PropKind::conj: return "and";
  case PropKind::disj: return "or";
  case PropKind::next: return "X";
  case PropKind::weak_next: return "WX";
  case PropKind::until: return "U";
  case PropKind::release: return "R";
  default: return "?";
  }
}

} // namespace

Property Property::top() {
  static const Property t = [] {
    auto n = make_prop(PropKind::top);
    n->key = "true";
    return Property(n);
  }();
  return t;
}

Property Property::bottom() {
  static const Property f = [] {
    auto n = make_prop(PropKind::bottom);
    n->key = "false";
    return Property(n);
  }();
  return f;
}

Property Property::lit(const Literal& l) {
  if (auto v = l.trivial_value()) return *v ? top() : bottom();
  auto n = make_prop(PropKind::literal);
  n->lit = l;
  n->key = l.key();
  n->size = 1;
  for (const auto& a : l.atom().args()) n->size += a.size();
  return Property(n);
}

Property Property::temporal(PropKind k, std::vector<Property> children) {
  auto n = make_prop(k);
  n->key = std::string("(") + op_name(k);
  for (const auto& c : children) {
    n->key += " " + c.key();
    n->size += c.size();
  }
  n->key += ")";
  n->children = std::move(children);
  return Property(n);
}

Property Property::junction(std::vector<Property> parts, bool is_conj) {
  const PropKind self = is_conj ? PropKind::conj : PropKind::disj;
  const PropKind unit = is_conj ? PropKind::top : PropKind::bottom;
  const PropKind zero = is_conj ? PropKind::bottom : PropKind::top;
  std::vector<Property> flat;
  for (auto& p : parts) {
    if (p.kind() == unit) continue;
    if (p.kind() == zero) return p;
    if (p.kind() == self)
      flat.insert(flat.end(), p.children().begin(), p.children().end());
    else
      flat.push_back(std::move(p));
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  std::set<std::string> keys;
  for (const auto& f : flat)
    if (f.kind() == PropKind::literal) keys.insert(f.key());
  for (const auto& f : flat)
    if (f.kind() == PropKind::literal && keys.count(f.literal().negated().key())) return is_conj ? bottom() : top();
  if (flat.empty()) return is_conj ? top() : bottom();
  if (flat.size() == 1) return flat.front();
  return temporal(self, std::move(flat));
}

Property Property::conj(std::vector<Property> parts) { return junction(std::move(parts), true); }
Property Property::disj(std::vector<Property> parts) { return junction(std::move(parts), false); }
Property Property::next(Property p) { return temporal(PropKind::next, {std::move(p)}); }
Property Property::weak_next(Property p) { return temporal(PropKind::weak_next, {std::move(p)}); }
Property Property::until(Property lhs, Property rhs) { return temporal(PropKind::until, {std::move(lhs), std::move(rhs)}); }
Property Property::release(Property lhs, Property rhs) {
  return temporal(PropKind::release, {std::move(lhs), std::move(rhs)});
}

PropKind Property::kind() const { return node_->kind; }
const Literal& Property::literal() const { return *node_->lit; }
const std::vector<Property>& Property::children() const { return node_->children; }
const std::string& Property::key() const { return node_->key; }
std::size_t Property::size() const { return node_->size; }

int Property::temporal_depth() const {
  int d = 0;
  for (const auto& c : children()) d = std::max(d, c.temporal_depth());
  switch (kind()) {
  case PropKind::next:
  case PropKind::weak_next:
  case PropKind::until:
  case PropKind::release: return d + 1;
  default: return d;
  }
}

void Property::collect_literals(std::vector<Literal>& out) const {
  if (kind() == PropKind::literal) out.push_back(literal());
  for (const auto& c : children()) c.collect_literals(out);
}

std::vector<Literal> collect_constraints(const Property& p) {
  std::vector<Literal> lits;
  p.collect_literals(lits);
  std::map<std::string, Literal> unique;
  for (const auto& l : lits) {
    unique.emplace(l.key(), l);
    auto n = l.negated();
    unique.emplace(n.key(), n);
  }
  std::vector<Literal> out;
  for (auto& [k, l] : unique) out.push_back(l);
  return out;
}

Property negate(const Property& p) {
  switch (p.kind()) {
  case PropKind::top: return Property::bottom();
  case PropKind::bottom: return Property::top();
  case PropKind::literal: return Property::lit(p.literal().negated());
  case PropKind::conj:
  case PropKind::disj: {
    std::vector<Property> parts;
    for (const auto& c : p.children()) parts.push_back(negate(c));
    return p.kind() == PropKind::conj ? Property::disj(std::move(parts)) : Property::conj(std::move(parts));
  }
  case PropKind::next: return Property::weak_next(negate(p.children()[0]));
  case PropKind::weak_next: return Property::next(negate(p.children()[0]));
  case PropKind::until: return Property::release(negate(p.children()[0]), negate(p.children()[1]));
  case PropKind::release: return Property::until(negate(p.children()[0]), negate(p.children()[1]));
  }
  return p;
}

namespace {

using Clause = std::vector<Property>;

/// Sorted, duplicate-free product; nullopt on complementary literals.
std::optional<Clause> join(const Clause& a, const Clause& b) {
  Clause out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  for (const auto& c : out)
    if (c.kind() == PropKind::literal && std::binary_search(out.begin(), out.end(), Property::lit(c.literal().negated())))
      return std::nullopt;
  return out;
}

bool dnf(const Property& p, std::vector<Clause>& out, std::size_t cap) {
  switch (p.kind()) {
  case PropKind::top: out = {Clause{}}; return true;
  case PropKind::bottom: out.clear(); return true;
  case PropKind::disj: {
    out.clear();
    for (const auto& c : p.children()) {
      std::vector<Clause> part;
      if (!dnf(c, part, cap)) return false;
      out.insert(out.end(), part.begin(), part.end());
      if (out.size() > cap) return false;
    }
    return true;
  }
  case PropKind::conj: {
    out = {Clause{}};
    for (const auto& c : p.children()) {
      std::vector<Clause> part, next;
      if (!dnf(c, part, cap)) return false;
      for (const auto& x : out)
        for (const auto& y : part)
          if (auto j = join(x, y)) next.push_back(std::move(*j));
      if (next.size() > cap) return false;
      out = std::move(next);
    }
    return true;
  }
  default: out = {Clause{p}}; return true;
  }
}

} // namespace

Property boolean_normal_form(const Property& p, std::size_t max_clauses) {
  std::vector<Clause> clauses;
  if (!dnf(p, clauses, max_clauses)) return p;
  std::sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<Clause> kept;
  for (const auto& c : clauses) {
    bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
      return std::includes(c.begin(), c.end(), k.begin(), k.end());
    });
    if (!subsumed) kept.push_back(c);
  }
  std::vector<Property> parts;
  for (auto& c : kept) parts.push_back(Property::conj(std::move(c)));
  return Property::disj(std::move(parts));
}

} // namespace datamon
