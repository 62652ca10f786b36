#include "datamon/parser.hpp"

#include "datamon/errors.hpp"

#include <map>
#include <set>

namespace datamon {

namespace {

[[noreturn]] void fail(const SExpr& e, const std::string& msg) { throw ParseError(msg, e.line, e.column); }

const std::string& symbol(const SExpr& e, const char* what) {
  if (!e.is_atom) fail(e, std::string("expected ") + what);
  return e.atom;
}

SortId resolve_sort(const Signature& sig, const SExpr& e) {
  const auto& name = symbol(e, "sort name");
  auto id = sig.find_sort(name);
  if (!id) fail(e, "unknown sort: " + name);
  return *id;
}

std::vector<SortId> resolve_sorts(const Signature& sig, const SExpr& e) {
  if (!e.is_list()) fail(e, "expected a list of sorts");
  std::vector<SortId> out;
  for (const auto& s : e.items) out.push_back(resolve_sort(sig, s));
  return out;
}

} // namespace

Signature parse_signature(std::string_view text) {
  static const std::set<std::string> reserved = {"X",   "WX",  "F",  "G",    "U",    "R",     "and",    "or",
                                                 "not", "->",  "=>", "<->",  "prev", "true",  "false",  "define",
                                                 "=",   "distinct", "!=", "<", "<=", ">", ">=", "+", "-", "*",
                                                 "exists", "forall"};
  Signature sig;
  for (const auto& d : parse_sexprs(text)) {
    const std::string h = d.head();
    const auto& it = d.items;
    if (it.size() >= 2 && it[1].is_atom && (reserved.count(it[1].atom) || parse_rational(it[1].atom)))
      fail(it[1], "reserved name cannot be declared: " + it[1].atom);
    try {
      if (h == "sort" && (it.size() == 2 || it.size() == 3)) {
        SortKind kind = SortKind::uninterpreted;
        if (it.size() == 3) {
          const auto& flag = symbol(it[2], "sort flag");
          if (flag == ":rational") kind = SortKind::rational;
          else if (flag == ":integer") kind = SortKind::integer;
          else fail(it[2], "unknown sort flag: " + flag);
        }
        sig.add_sort(symbol(it[1], "sort name"), kind);
      } else if (h == "fun" && it.size() == 4) {
        sig.add_function(symbol(it[1], "function name"), resolve_sorts(sig, it[2]), resolve_sort(sig, it[3]));
      } else if (h == "const" && it.size() == 3) {
        sig.add_function(symbol(it[1], "constant name"), {}, resolve_sort(sig, it[2]));
      } else if (h == "pred" && it.size() == 3) {
        sig.add_predicate(symbol(it[1], "predicate name"), resolve_sorts(sig, it[2]));
      } else if (h == "var" && it.size() == 3) {
        sig.add_variable(symbol(it[1], "variable name"), resolve_sort(sig, it[2]));
      } else {
        fail(d, "malformed declaration: " + d.to_string());
      }
    } catch (const TypeError& e) {
      throw ParseError(e.what(), d.line, d.column);
    }
  }
  sig.validate();
  return sig;
}

namespace {

bool is_numeral(const SExpr& e) { return e.is_atom && parse_rational(e.atom).has_value(); }

class PropertyReader {
public:
  PropertyReader(const Signature& sig, bool temporal) : sig_(sig), temporal_(temporal) {}

  void define(const SExpr& d) {
    if (d.items.size() != 3) fail(d, "define expects a name and an expression");
    const auto& name = symbol(d.items[1], "definition name");
    if (sig_.find_variable(name) || sig_.find_function(name) || sig_.find_predicate(name) || defs_.count(name))
      fail(d.items[1], "definition name already in use: " + name);
    defs_.emplace(name, d.items[2]);
  }

  Property read(const SExpr& e, bool positive) {
    if (e.is_atom) {
      if (e.atom == "true") return positive ? Property::top() : Property::bottom();
      if (e.atom == "false") return positive ? Property::bottom() : Property::top();
      if (auto it = defs_.find(e.atom); it != defs_.end()) return read(it->second, positive);
      if (const auto* p = sig_.find_predicate(e.atom); p && p->args.empty())
        return Property::lit(Literal(Atom::predicate(e.atom, {}), positive));
      fail(e, "expected a property, found: " + e.atom);
    }
    if (e.items.empty()) fail(e, "empty expression");
    const std::string h = e.head();
    const auto& it = e.items;
    auto args = [&](std::size_t n) {
      if (it.size() != n + 1) fail(e, "'" + h + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (h == "exists" || h == "forall") fail(e, "quantifiers unsupported");
    if (h == "not") {
      args(1);
      return read(it[1], !positive);
    }
    if (h == "and" || h == "or") {
      std::vector<Property> parts;
      for (std::size_t i = 1; i < it.size(); ++i) parts.push_back(read(it[i], positive));
      return (h == "and") == positive ? Property::conj(std::move(parts)) : Property::disj(std::move(parts));
    }
    if (h == "->" || h == "=>") {
      args(2);
      if (positive) return Property::disj(read(it[1], false), read(it[2], true));
      return Property::conj(read(it[1], true), read(it[2], false));
    }
    if (h == "<->") {
      args(2);
      auto a = read(it[1], true), na = read(it[1], false);
      auto b = read(it[2], positive), nb = read(it[2], !positive);
      return Property::disj(Property::conj(a, b), Property::conj(na, nb));
    }
    if (h == "X" || h == "WX" || h == "F" || h == "G" || h == "U" || h == "R") {
      if (!temporal_) fail(e, "temporal operator not allowed here: " + h);
      if (h == "U" || h == "R") {
        args(2);
        auto a = read(it[1], positive), b = read(it[2], positive);
        return (h == "U") == positive ? Property::until(a, b) : Property::release(a, b);
      }
      args(1);
      auto p = read(it[1], positive);
      if (h == "X") return positive ? Property::next(p) : Property::weak_next(p);
      if (h == "WX") return positive ? Property::weak_next(p) : Property::next(p);
      if (h == "F") return positive ? Property::eventually(p) : Property::always(p);
      return positive ? Property::always(p) : Property::eventually(p);
    }
    return Property::lit(read_atom(e, positive));
  }

  Term term(const SExpr& e, std::optional<SortId> expected) {
    if (e.is_atom) {
      if (auto v = parse_rational(e.atom)) {
        SortId s;
        if (expected) {
          s = *expected;
          if (!sig_.is_arithmetic(s)) fail(e, "numeral " + e.atom + " used at non-arithmetic sort " + sig_.sort_name(s));
        } else if (auto r = sig_.first_sort_of(SortKind::rational)) {
          s = *r;
        } else if (auto i = sig_.first_sort_of(SortKind::integer)) {
          s = *i;
        } else {
          fail(e, "numeral without an arithmetic sort: " + e.atom);
        }
        if (sig_.sort(s).kind == SortKind::integer && boost::multiprecision::denominator(*v) != 1)
          fail(e, "non-integer numeral at integer sort: " + e.atom);
        return check(e, Term::number(*v, s), expected);
      }
      if (const auto* v = sig_.find_variable(e.atom)) return check(e, Term::variable(v->name, v->sort), expected);
      if (const auto* f = sig_.find_function(e.atom); f && f->args.empty())
        return check(e, Term::apply(f->name, {}, f->result), expected);
      fail(e, "unknown term symbol: " + e.atom);
    }
    const std::string h = e.head();
    if (h.empty()) fail(e, "malformed term");
    const auto& it = e.items;
    if (h == "prev") {
      if (it.size() != 2) fail(e, "prev expects one variable");
      const auto& name = symbol(it[1], "variable");
      const auto* v = sig_.find_variable(name);
      if (!v) fail(it[1], "prev applies to state variables only: " + it[1].to_string());
      return check(e, Term::previous(v->name, v->sort), expected);
    }
    if (is_arith_builtin_name(h)) {
      if (it.size() < 2) fail(e, "'" + h + "' expects arguments");
      std::vector<SExpr> rest(it.begin() + 1, it.end());
      auto terms = typed_list(rest, expected);
      SortId s = terms.front().sort();
      if (!sig_.is_arithmetic(s)) fail(e, "arithmetic over non-arithmetic sort " + sig_.sort_name(s));
      for (const auto& t : terms)
        if (t.sort() != s) fail(e, "mixed sorts in arithmetic");
      if (h == "*") {
        int nonconst = 0;
        for (const auto& t : terms) nonconst += t.kind() != TermKind::num;
        if (nonconst > 1) fail(e, "nonlinear multiplication");
      }
      return check(e, Term::apply(h, std::move(terms), s), expected);
    }
    const auto* f = sig_.find_function(h);
    if (!f) fail(e, "unknown function: " + h);
    if (f->args.size() + 1 != it.size()) fail(e, "wrong number of arguments to " + h);
    std::vector<Term> args;
    for (std::size_t i = 0; i < f->args.size(); ++i) args.push_back(term(it[i + 1], f->args[i]));
    return check(e, Term::apply(f->name, std::move(args), f->result), expected);
  }

private:
  Term check(const SExpr& e, Term t, std::optional<SortId> expected) {
    if (expected && t.sort() != *expected)
      fail(e, "sort mismatch: " + t.key() + " has sort " + sig_.sort_name(t.sort()) + ", expected " +
                  sig_.sort_name(*expected));
    return t;
  }

  /// Terms sharing one sort; bare numerals take the sort of their siblings.
  std::vector<Term> typed_list(const std::vector<SExpr>& es, std::optional<SortId> expected) {
    std::vector<std::optional<Term>> out(es.size());
    for (std::size_t i = 0; i < es.size(); ++i)
      if (!is_numeral(es[i])) {
        out[i] = term(es[i], expected);
        if (!expected) expected = out[i]->sort();
      }
    for (std::size_t i = 0; i < es.size(); ++i)
      if (!out[i]) out[i] = term(es[i], expected);
    std::vector<Term> r;
    for (auto& t : out) r.push_back(*t);
    return r;
  }

  Literal read_atom(const SExpr& e, bool positive) {
    const std::string h = e.head();
    const auto& it = e.items;
    std::vector<SExpr> rest(it.begin() + 1, it.end());
    auto binary = [&]() {
      if (rest.size() != 2) fail(e, "'" + h + "' expects two arguments");
      auto ts = typed_list(rest, std::nullopt);
      if (ts[0].sort() != ts[1].sort()) fail(e, "sort mismatch in " + e.to_string());
      return ts;
    };
    auto ordered = [&](const std::vector<Term>& ts) {
      if (!sig_.is_arithmetic(ts[0].sort())) fail(e, "order comparison on non-arithmetic sort " + sig_.sort_name(ts[0].sort()));
    };
    if (h == "=") {
      auto ts = binary();
      return Literal(Atom::equal(ts[0], ts[1]), positive);
    }
    if (h == "distinct" || h == "!=") {
      auto ts = binary();
      return Literal(Atom::equal(ts[0], ts[1]), !positive);
    }
    if (h == "<" || h == "<=" || h == ">" || h == ">=") {
      auto ts = binary();
      ordered(ts);
      Atom a = h == "<"    ? Atom::less(ts[0], ts[1])
               : h == "<=" ? Atom::less_equal(ts[0], ts[1])
               : h == ">"  ? Atom::less(ts[1], ts[0])
                           : Atom::less_equal(ts[1], ts[0]);
      return Literal(a, positive);
    }
    const auto* p = sig_.find_predicate(h);
    if (!p) fail(e, "unknown predicate or operator: " + h);
    if (p->args.size() != rest.size()) fail(e, "wrong number of arguments to " + h);
    std::vector<Term> args;
    for (std::size_t i = 0; i < rest.size(); ++i) args.push_back(term(rest[i], p->args[i]));
    return Literal(Atom::predicate(h, std::move(args)), positive);
  }

  const Signature& sig_;
  bool temporal_;
  std::map<std::string, SExpr> defs_;
};

Formula to_formula(const Property& p) {
  switch (p.kind()) {
  case PropKind::top: return Formula::top();
  case PropKind::bottom: return Formula::bottom();
  case PropKind::literal: return Formula::lit(p.literal());
  case PropKind::conj:
  case PropKind::disj: {
    std::vector<Formula> parts;
    for (const auto& c : p.children()) parts.push_back(to_formula(c));
    return p.kind() == PropKind::conj ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
  }
  default: throw TypeError("temporal operator inside a state formula");
  }
}

Property read_document(std::string_view text, const Signature& sig, bool temporal) {
  auto exprs = parse_sexprs(text);
  PropertyReader reader(sig, temporal);
  const SExpr* body = nullptr;
  for (const auto& e : exprs) {
    if (body) fail(e, "unexpected expression after the property");
    if (e.head() == "define") reader.define(e);
    else body = &e;
  }
  if (!body) throw ParseError("no property expression found", 1, 1);
  try {
    return reader.read(*body, true);
  } catch (const TypeError& err) {
    throw ParseError(err.what(), body->line, body->column);
  }
}

} // namespace

Property parse_property(std::string_view text, const Signature& sig) { return read_document(text, sig, true); }

Formula parse_formula(std::string_view text, const Signature& sig) {
  return to_formula(read_document(text, sig, false));
}

Term parse_term(const SExpr& e, const Signature& sig, std::optional<SortId> expected) {
  return PropertyReader(sig, false).term(e, expected);
}

Property parse_property_expr(const SExpr& e, const Signature& sig) { return PropertyReader(sig, true).read(e, true); }

} // namespace datamon
