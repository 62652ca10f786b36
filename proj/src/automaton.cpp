#include "datamon/automaton.hpp"

#include "datamon/errors.hpp"
#include "datamon/parser.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace datamon {

namespace {

const char* marker_text(Marker m) {
  switch (m) {
  case Marker::last: return "last";
  case Marker::not_last: return "not_last";
  default: return "";
  }
}

Marker parse_marker(const std::string& s) {
  if (s == "last") return Marker::last;
  if (s == "not_last") return Marker::not_last;
  if (s.empty()) return Marker::none;
  throw Error("unknown marker '" + s + "'");
}

std::string label_text(const Symbol& s) {
  std::string out = "{";
  bool first = true;
  auto add = [&](const std::string& t) {
    if (!first) out += ", ";
    out += t;
    first = false;
  };
  if (s.marker == Marker::last) add("λ");
  if (s.marker == Marker::not_last) add("¬λ");
  for (const auto& l : s.literals) add(l.key());
  return out + "}";
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

} // namespace

std::optional<Symbol> Symbol::merge(const Symbol& a, const Symbol& b) {
  Symbol r;
  if (a.marker != Marker::none && b.marker != Marker::none && a.marker != b.marker) return std::nullopt;
  r.marker = a.marker != Marker::none ? a.marker : b.marker;
  std::set<Literal> lits(a.literals.begin(), a.literals.end());
  lits.insert(b.literals.begin(), b.literals.end());
  for (const auto& l : lits)
    if (lits.count(l.negated())) return std::nullopt;
  r.literals.assign(lits.begin(), lits.end());
  return r;
}

std::string Symbol::key() const {
  std::string k = marker_text(marker);
  k += "|";
  for (const auto& l : literals) k += l.key() + ";";
  return k;
}

bool Symbol::mentions_prev() const {
  return std::any_of(literals.begin(), literals.end(), [](const Literal& l) { return l.mentions_prev(); });
}

bool DeltaEngine::satisfiable(const Symbol& s) {
  if (opts_.pruning != Pruning::theory || !opts_.theory || s.literals.empty()) return true;
  auto k = s.key();
  if (auto it = sat_memo_.find(k); it != sat_memo_.end()) return it->second;
  bool sat = true;
  try {
    sat = opts_.theory->is_satisfiable(s.formula());
  } catch (const UnsupportedError&) {
    sat = true;
  }
  sat_memo_[k] = sat;
  return sat;
}

DeltaEngine::Pairs DeltaEngine::product(const Pairs& a, const Pairs& b, bool conj) {
  Pairs out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [p1, s1] : a)
    for (const auto& [p2, s2] : b) {
      std::optional<Symbol> s;
      if (opts_.pruning == Pruning::none) {
        s = Symbol{};
        std::set<Literal> lits(s1.literals.begin(), s1.literals.end());
        lits.insert(s2.literals.begin(), s2.literals.end());
        s->literals.assign(lits.begin(), lits.end());
        if (s1.marker != Marker::none && s2.marker != Marker::none && s1.marker != s2.marker) continue;
        s->marker = s1.marker != Marker::none ? s1.marker : s2.marker;
      } else {
        s = Symbol::merge(s1, s2);
        if (!s || !satisfiable(*s)) continue;
      }
      Property p = conj ? Property::conj(p1, p2) : Property::disj(p1, p2);
      if (seen.insert({p.key(), s->key()}).second) out.emplace_back(std::move(p), std::move(*s));
    }
  return out;
}

const std::vector<std::pair<Property, Symbol>>& DeltaEngine::delta(const Property& p) {
  if (auto it = memo_.find(p.key()); it != memo_.end()) return it->second;
  Pairs r;
  switch (p.kind()) {
  case PropKind::top: r = {{Property::top(), Symbol{}}}; break;
  case PropKind::bottom: r = {{Property::bottom(), Symbol{}}}; break;
  case PropKind::literal: {
    const auto& l = p.literal();
    if (auto v = l.trivial_value(); v && opts_.pruning != Pruning::none) {
      r = {{*v ? Property::top() : Property::bottom(), Symbol{}}};
      break;
    }
    r.emplace_back(Property::top(), Symbol::of(l));
    r.emplace_back(Property::bottom(), Symbol::of(l.negated()));
    if (opts_.pruning == Pruning::theory) {
      Pairs kept;
      for (auto& pr : r)
        if (satisfiable(pr.second)) kept.push_back(std::move(pr));
      r = std::move(kept);
    }
    break;
  }
  case PropKind::conj:
  case PropKind::disj: {
    bool is_conj = p.kind() == PropKind::conj;
    r = delta(p.children()[0]);
    for (std::size_t i = 1; i < p.children().size(); ++i) {
      Pairs next = delta(p.children()[i]);
      r = product(r, next, is_conj);
    }
    break;
  }
  case PropKind::next:
    r = {{p.children()[0], Symbol::of(Marker::not_last)}, {Property::bottom(), Symbol::of(Marker::last)}};
    break;
  case PropKind::weak_next:
    r = {{p.children()[0], Symbol::of(Marker::not_last)}, {Property::top(), Symbol::of(Marker::last)}};
    break;
  case PropKind::until: {
    Pairs lhs = delta(p.children()[0]), rhs = delta(p.children()[1]);
    Pairs step = delta(Property::next(p));
    r = product(rhs, product(lhs, step, true), false);
    break;
  }
  case PropKind::release: {
    Pairs lhs = delta(p.children()[0]), rhs = delta(p.children()[1]);
    Pairs step = delta(Property::weak_next(p));
    r = product(rhs, product(lhs, step, false), true);
    break;
  }
  }
  return memo_.emplace(p.key(), std::move(r)).first->second;
}

std::optional<int> Nfa::find_state(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Nfa::add_state(std::optional<Property> p, std::string name) {
  std::string key = p ? p->key() : name;
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  int id = static_cast<int>(names_.size());
  names_.push_back(std::move(name));
  props_.push_back(std::move(p));
  out_.emplace_back();
  in_.emplace_back();
  index_.emplace(key, id);
  return id;
}

void Nfa::add_transition(Transition t) {
  int id = static_cast<int>(transitions_.size());
  out_[t.from].push_back(id);
  in_[t.to].push_back(id);
  transitions_.push_back(std::move(t));
}

Nfa build_nfa(const Property& p, const NfaOptions& opts) {
  Nfa a;
  DeltaEngine engine(opts.delta);
  Property init = boolean_normal_form(p);
  a.add_state(init, init.key());
  int top = a.add_state(Property::top(), "true");
  int acc = a.add_state(std::nullopt, "q+");
  int rej = a.add_state(std::nullopt, "q-");
  a.set_sinks(acc, rej, top);

  std::vector<int> work{0};
  if (top != 0) work.push_back(top);
  std::set<int> done;
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    if (!done.insert(q).second) continue;
    const Property& prop = *a.property(q);
    for (const auto& [raw, sym] : engine.delta(prop)) {
      Property succ = boolean_normal_form(raw);
      if (sym.marker != Marker::last) {
        auto known = a.find_state(succ.key());
        if (!known && a.size() >= opts.max_states)
          throw ResourceError("automaton exceeds " + std::to_string(opts.max_states) + " states");
        int to = known ? *known : a.add_state(succ, succ.key());
        a.add_transition({q, to, sym, false});
        if (!done.count(to)) work.push_back(to);
      } else if (succ.is_top()) {
        a.add_transition({q, acc, sym, true});
      } else if (succ.is_bottom()) {
        Symbol stripped = sym;
        stripped.marker = Marker::none;
        a.add_transition({q, rej, stripped, true});
      }
    }
  }
  return a;
}

bool check_safe_lookback(const Nfa& a) {
  for (int t : a.outgoing(a.initial()))
    if (a.transitions()[t].label.mentions_prev()) return false;
  return true;
}

Truth symbol_consistent(const Symbol& s, const Assignment* prev, const Assignment& curr, const FactBase& facts,
                        bool is_last) {
  if (s.marker == Marker::last && !is_last) return Truth::false_;
  if (s.marker == Marker::not_last && is_last) return Truth::false_;
  if (!prev && s.mentions_prev()) return Truth::false_;
  return eval_ground(s.formula(), facts, make_environment(prev, curr));
}

std::string nfa_to_json(const Nfa& a) {
  nlohmann::json j;
  j["initial"] = a.initial();
  j["accept_sink"] = a.accept_sink();
  j["reject_sink"] = a.reject_sink();
  j["top_state"] = a.top_state();
  auto& states = j["states"] = nlohmann::json::array();
  for (std::size_t q = 0; q < a.size(); ++q) {
    nlohmann::json s{{"id", q}, {"name", a.name(static_cast<int>(q))}, {"final", a.is_final(static_cast<int>(q))}};
    s["property"] = a.property(static_cast<int>(q)) ? nlohmann::json(a.property(static_cast<int>(q))->key())
                                                      : nlohmann::json(nullptr);
    states.push_back(std::move(s));
  }
  auto& trans = j["transitions"] = nlohmann::json::array();
  for (const auto& t : a.transitions()) {
    nlohmann::json lits = nlohmann::json::array();
    for (const auto& l : t.label.literals) lits.push_back(l.key());
    trans.push_back({{"from", t.from},
                     {"to", t.to},
                     {"marker", marker_text(t.label.marker)},
                     {"constraints", lits},
                     {"last_step", t.last_step}});
  }
  return j.dump(2);
}

std::string nfa_to_dot(const Nfa& a) {
  std::ostringstream os;
  os << "digraph nfa {\n  rankdir=LR;\n  start [shape=point];\n";
  for (std::size_t q = 0; q < a.size(); ++q) {
    int s = static_cast<int>(q);
    os << "  s" << q << " [label=\"" << dot_escape(a.name(s)) << "\", shape="
       << (a.is_final(s) ? "doublecircle" : "circle") << "];\n";
  }
  os << "  start -> s" << a.initial() << ";\n";
  for (const auto& t : a.transitions())
    os << "  s" << t.from << " -> s" << t.to << " [label=\"" << dot_escape(label_text(t.label)) << "\"];\n";
  os << "}\n";
  return os.str();
}

Nfa nfa_from_json(const std::string& text, const Signature& sig) {
  auto j = nlohmann::json::parse(text);
  Nfa a;
  std::map<std::string, Literal> cache;
  auto literal_of = [&](const std::string& k) -> Literal {
    if (auto it = cache.find(k); it != cache.end()) return it->second;
    Formula f = parse_formula(k, sig);
    if (f.kind() != FormulaKind::literal) throw Error("constraint '" + k + "' is not a literal");
    return cache.emplace(k, f.literal()).first->second;
  };
  for (const auto& s : j.at("states")) {
    std::optional<Property> p;
    if (!s.at("property").is_null()) p = parse_property(s.at("property").get<std::string>(), sig);
    int id = a.add_state(p, s.at("name").get<std::string>());
    if (id != s.at("id").get<int>()) throw Error("state ids are not dense");
  }
  a.set_sinks(j.at("accept_sink"), j.at("reject_sink"), j.at("top_state"));
  for (const auto& t : j.at("transitions")) {
    Symbol sym;
    sym.marker = parse_marker(t.at("marker").get<std::string>());
    for (const auto& l : t.at("constraints")) sym.literals.push_back(literal_of(l.get<std::string>()));
    std::sort(sym.literals.begin(), sym.literals.end());
    a.add_transition({t.at("from"), t.at("to"), std::move(sym), t.at("last_step")});
  }
  return a;
}

} // namespace datamon
