#include "datamon/term.hpp"

#include "datamon/errors.hpp"

#include <algorithm>

namespace datamon {

// ---------------------------------------------------------------- Term

bool is_arith_builtin_name(const std::string& name) { return name == "+" || name == "-" || name == "*"; }

Term Term::variable(const std::string& name, SortId sort) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::var;
  n->name = name;
  n->sort = sort;
  n->key = name;
  return Term(std::move(n));
}

Term Term::previous(const std::string& name, SortId sort) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::prev;
  n->name = name;
  n->sort = sort;
  n->key = "(prev " + name + ")";
  n->has_prev = true;
  return Term(std::move(n));
}

Term Term::apply(const std::string& fn, std::vector<Term> args, SortId sort) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::app;
  n->name = fn;
  n->sort = sort;
  if (args.empty()) {
    n->key = fn;
  } else {
    n->key = "(" + fn;
    for (const auto& a : args) {
      n->key += " " + a.key();
      n->size += a.size();
      n->has_prev = n->has_prev || a.mentions_prev();
    }
    n->key += ")";
  }
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::number(const Rational& value, SortId sort) {
  auto n = std::make_shared<TermNode>();
  n->kind = TermKind::num;
  n->sort = sort;
  n->value = value;
  n->key = to_string(value);
  return Term(std::move(n));
}

TermKind Term::kind() const { return node_->kind; }
const std::string& Term::name() const { return node_->name; }
SortId Term::sort() const { return node_->sort; }
const std::vector<Term>& Term::args() const { return node_->args; }
const Rational& Term::value() const { return node_->value; }
const std::string& Term::key() const { return node_->key; }
std::size_t Term::size() const { return node_->size; }
bool Term::mentions_prev() const { return node_->has_prev; }
bool Term::is_arith_builtin() const { return kind() == TermKind::app && is_arith_builtin_name(name()); }

void Term::for_each_variable(const std::function<void(const Term&)>& fn) const {
  if (is_variable()) {
    fn(*this);
    return;
  }
  for (const auto& a : args()) a.for_each_variable(fn);
}

// ---------------------------------------------------------------- Atom

Atom::Atom(AtomKind kind, std::string name, std::vector<Term> args)
    : kind_(kind), name_(std::move(name)), args_(std::move(args)) {
  switch (kind_) {
  case AtomKind::eq: key_ = "(= " + args_[0].key() + " " + args_[1].key() + ")"; break;
  case AtomKind::lt: key_ = "(< " + args_[0].key() + " " + args_[1].key() + ")"; break;
  case AtomKind::le: key_ = "(<= " + args_[0].key() + " " + args_[1].key() + ")"; break;
  case AtomKind::pred:
    if (args_.empty()) {
      key_ = name_;
    } else {
      key_ = "(" + name_;
      for (const auto& a : args_) key_ += " " + a.key();
      key_ += ")";
    }
    break;
  }
}

Atom Atom::equal(Term a, Term b) {
  if (a.sort() != b.sort()) throw TypeError("equality between different sorts: " + a.key() + ", " + b.key());
  if (b < a) std::swap(a, b);
  return Atom(AtomKind::eq, "=", {std::move(a), std::move(b)});
}

Atom Atom::less(Term a, Term b) {
  if (a.sort() != b.sort()) throw TypeError("comparison between different sorts: " + a.key() + ", " + b.key());
  return Atom(AtomKind::lt, "<", {std::move(a), std::move(b)});
}

Atom Atom::less_equal(Term a, Term b) {
  if (a.sort() != b.sort()) throw TypeError("comparison between different sorts: " + a.key() + ", " + b.key());
  return Atom(AtomKind::le, "<=", {std::move(a), std::move(b)});
}

Atom Atom::predicate(const std::string& name, std::vector<Term> args) {
  return Atom(AtomKind::pred, name, std::move(args));
}

bool Atom::mentions_prev() const {
  return std::any_of(args_.begin(), args_.end(), [](const Term& t) { return t.mentions_prev(); });
}

// ---------------------------------------------------------------- Literal

namespace {

Atom converse_order(const Atom& a) {
  // not (a < b)  ==  b <= a ;  not (a <= b)  ==  b < a   (total orders)
  if (a.kind() == AtomKind::lt) return Atom::less_equal(a.args()[1], a.args()[0]);
  return Atom::less(a.args()[1], a.args()[0]);
}

} // namespace

Literal::Literal(Atom atom, bool positive)
    : atom_(positive || !atom.is_order() ? std::move(atom) : converse_order(atom)),
      positive_(positive || atom_.is_order()) {
  key_ = positive_ ? atom_.key() : "(not " + atom_.key() + ")";
}

Literal Literal::negated() const {
  if (atom_.is_order()) return Literal(converse_order(atom_), true);
  return Literal(atom_, !positive_);
}

std::optional<bool> Literal::trivial_value() const {
  std::optional<bool> v;
  const auto& args = atom_.args();
  switch (atom_.kind()) {
  case AtomKind::eq:
    if (args[0] == args[1]) v = true;
    else if (args[0].kind() == TermKind::num && args[1].kind() == TermKind::num) v = false;
    break;
  case AtomKind::lt:
    if (args[0] == args[1]) v = false;
    else if (args[0].kind() == TermKind::num && args[1].kind() == TermKind::num) v = args[0].value() < args[1].value();
    break;
  case AtomKind::le:
    if (args[0] == args[1]) v = true;
    else if (args[0].kind() == TermKind::num && args[1].kind() == TermKind::num) v = args[0].value() <= args[1].value();
    break;
  case AtomKind::pred: break;
  }
  if (v && !positive_) return !*v;
  return v;
}

// ---------------------------------------------------------------- Formula

namespace {

std::shared_ptr<FormulaNode> make_node(FormulaKind k) {
  auto n = std::make_shared<FormulaNode>();
  n->kind = k;
  return n;
}

} // namespace

Formula Formula::top() {
  static const Formula t = [] {
    auto n = make_node(FormulaKind::truth);
    n->key = "true";
    return Formula(n);
  }();
  return t;
}

Formula Formula::bottom() {
  static const Formula f = [] {
    auto n = make_node(FormulaKind::falsity);
    n->key = "false";
    return Formula(n);
  }();
  return f;
}

Formula Formula::lit(const Literal& l) {
  if (auto v = l.trivial_value()) return *v ? top() : bottom();
  auto n = make_node(FormulaKind::literal);
  n->lit = l;
  n->key = l.key();
  return Formula(n);
}

Formula Formula::junction(std::vector<Formula> parts, bool is_conj) {
  const FormulaKind self = is_conj ? FormulaKind::conj : FormulaKind::disj;
  const FormulaKind unit = is_conj ? FormulaKind::truth : FormulaKind::falsity;
  const FormulaKind zero = is_conj ? FormulaKind::falsity : FormulaKind::truth;
  std::vector<Formula> flat;
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
    if (f.kind() == FormulaKind::literal) keys.insert(f.key());
  for (const auto& f : flat)
    if (f.kind() == FormulaKind::literal && keys.count(f.literal().negated().key()))
      return is_conj ? bottom() : top();
  if (flat.empty()) return is_conj ? top() : bottom();
  if (flat.size() == 1) return flat.front();
  auto n = make_node(self);
  n->key = is_conj ? "(and" : "(or";
  for (const auto& f : flat) n->key += " " + f.key();
  n->key += ")";
  n->children = std::move(flat);
  return Formula(n);
}

Formula Formula::conj(std::vector<Formula> parts) { return junction(std::move(parts), true); }
Formula Formula::disj(std::vector<Formula> parts) { return junction(std::move(parts), false); }

Formula Formula::conj_of(const std::vector<Literal>& lits) {
  std::vector<Formula> parts;
  parts.reserve(lits.size());
  for (const auto& l : lits) parts.push_back(lit(l));
  return conj(std::move(parts));
}

FormulaKind Formula::kind() const { return node_->kind; }
const Literal& Formula::literal() const { return *node_->lit; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const std::string& Formula::key() const { return node_->key; }

void Formula::collect_literals(std::vector<Literal>& out) const {
  if (kind() == FormulaKind::literal) out.push_back(literal());
  for (const auto& c : children()) c.collect_literals(out);
}

bool Formula::mentions_prev() const {
  if (kind() == FormulaKind::literal) return literal().mentions_prev();
  for (const auto& c : children())
    if (c.mentions_prev()) return true;
  return false;
}

std::set<std::string> Formula::variable_keys() const {
  std::vector<Literal> lits;
  collect_literals(lits);
  std::set<std::string> out;
  for (const auto& l : lits)
    for (const auto& a : l.atom().args()) a.for_each_variable([&](const Term& v) { out.insert(v.key()); });
  return out;
}

Formula negate(const Formula& f) {
  switch (f.kind()) {
  case FormulaKind::truth: return Formula::bottom();
  case FormulaKind::falsity: return Formula::top();
  case FormulaKind::literal: return Formula::lit(f.literal().negated());
  case FormulaKind::conj:
  case FormulaKind::disj: {
    std::vector<Formula> parts;
    for (const auto& c : f.children()) parts.push_back(negate(c));
    return f.kind() == FormulaKind::conj ? Formula::disj(std::move(parts)) : Formula::conj(std::move(parts));
  }
  }
  return f;
}

// ---------------------------------------------------------------- Substitution

void Substitution::add(const Term& var, const Term& replacement) {
  if (!var.is_variable()) throw TypeError("substitution domain must be a variable: " + var.key());
  if (var.sort() != replacement.sort())
    throw TypeError("sort mismatch substituting " + replacement.key() + " for " + var.key());
  map_.insert_or_assign(var.key(), replacement);
}

const Term* Substitution::find(const std::string& var_key) const {
  auto it = map_.find(var_key);
  return it == map_.end() ? nullptr : &it->second;
}

Term substitute(const Term& t, const Substitution& s) {
  switch (t.kind()) {
  case TermKind::var:
  case TermKind::prev: {
    const Term* r = s.find(t.key());
    return r ? *r : t;
  }
  case TermKind::num: return t;
  case TermKind::app: {
    if (t.args().empty()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const auto& a : t.args()) args.push_back(substitute(a, s));
    return Term::apply(t.name(), std::move(args), t.sort());
  }
  }
  return t;
}

Literal substitute(const Literal& l, const Substitution& s) {
  const auto& a = l.atom();
  std::vector<Term> args;
  for (const auto& t : a.args()) args.push_back(substitute(t, s));
  switch (a.kind()) {
  case AtomKind::eq: return Literal(Atom::equal(args[0], args[1]), l.positive());
  case AtomKind::lt: return Literal(Atom::less(args[0], args[1]), l.positive());
  case AtomKind::le: return Literal(Atom::less_equal(args[0], args[1]), l.positive());
  case AtomKind::pred: return Literal(Atom::predicate(a.name(), std::move(args)), l.positive());
  }
  return l;
}

Formula substitute(const Formula& f, const Substitution& s) {
  if (s.empty()) return f;
  switch (f.kind()) {
  case FormulaKind::truth:
  case FormulaKind::falsity: return f;
  case FormulaKind::literal: return Formula::lit(substitute(f.literal(), s));
  case FormulaKind::conj:
  case FormulaKind::disj: {
    std::vector<Formula> parts;
    for (const auto& c : f.children()) parts.push_back(substitute(c, s));
    return f.kind() == FormulaKind::conj ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
  }
  }
  return f;
}

} // namespace datamon
