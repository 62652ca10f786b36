#include "datamon/monitor.hpp"

#include "datamon/errors.hpp"

#include <chrono>

namespace datamon {

const char* to_string(VerdictKind k) {
  switch (k) {
  case VerdictKind::cs: return "cs";
  case VerdictKind::ps: return "ps";
  case VerdictKind::cv: return "cv";
  case VerdictKind::pv: return "pv";
  case VerdictKind::satisfied_so_far: return "satisfied-so-far";
  case VerdictKind::violated_so_far: return "violated-so-far";
  case VerdictKind::inconclusive: return "inconclusive";
  }
  return "?";
}

VerdictKind parse_verdict(const std::string& s) {
  for (auto k : {VerdictKind::cs, VerdictKind::ps, VerdictKind::cv, VerdictKind::pv, VerdictKind::satisfied_so_far,
                 VerdictKind::violated_so_far, VerdictKind::inconclusive})
    if (s == to_string(k)) return k;
  throw Error("unknown verdict '" + s + "'");
}

int exit_code(VerdictKind k) {
  switch (k) {
  case VerdictKind::cs: return 10;
  case VerdictKind::ps: return 0;
  case VerdictKind::cv: return 11;
  case VerdictKind::pv: return 1;
  default: return 2;
  }
}

Artifacts compile(const Property& p, Theory& th, const CompileOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  Artifacts art;
  art.property = p;
  NfaOptions nfa = opts.nfa;
  if (opts.theory_pruning) {
    nfa.delta.pruning = Pruning::theory;
    nfa.delta.theory = &th;
  }
  art.nfa = build_nfa(p, nfa);
  art.positive = build_cg(art.nfa, th, Polarity::positive, opts.cg);
  art.negative = build_cg(art.nfa, th, Polarity::negative, opts.cg);
  compute_ext(art);
  art.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return art;
}

void compute_ext(Artifacts& art) {
  art.ext_sat.clear();
  art.ext_viol.clear();
  for (std::size_t q = 0; q < art.nfa.size(); ++q) {
    art.ext_sat.push_back(ext_formula(art.positive, static_cast<int>(q)));
    art.ext_viol.push_back(ext_formula(art.negative, static_cast<int>(q)));
  }
}

Entailment::Entailment(const FactBase& facts, const TheoryConfig& cfg)
    : sig_(std::make_unique<Signature>(facts.signature())) {
  const auto& base = facts.signature();
  std::vector<Formula> ax;
  for (std::size_t s = 0; s < base.sorts().size(); ++s) {
    SortId sort = static_cast<SortId>(s);
    if (base.is_arithmetic(sort)) continue;
    const auto& names = facts.elements(sort);
    for (const auto& n : names) sig_->add_function("@" + n, {}, sort);
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        ax.push_back(Formula::lit(Literal(Atom::equal(element(Value::element(sort, names[i])),
                                                      element(Value::element(sort, names[j]))),
                                          false)));
  }
  theory_ = make_theory(*sig_, cfg);
  for (const auto& [fn, table] : facts.function_facts()) {
    const auto* decl = base.find_function(fn);
    for (const auto& [args, val] : table) {
      std::vector<Term> ts;
      for (const auto& a : args) ts.push_back(element(a));
      ax.push_back(Formula::lit(Literal(Atom::equal(Term::apply(fn, ts, decl->result), element(val)), true)));
    }
  }
  for (const auto& [pred, table] : facts.predicate_facts())
    for (const auto& [args, holds] : table) {
      std::vector<Term> ts;
      for (const auto& a : args) ts.push_back(element(a));
      ax.push_back(Formula::lit(Literal(Atom::predicate(pred, ts), holds)));
    }
  for (const auto& pred : facts.closed_predicates()) {
    const auto* decl = base.find_predicate(pred);
    if (!decl) continue;
    bool finite = true;
    for (SortId s : decl->args) finite = finite && !base.is_arithmetic(s);
    if (!finite) continue;
    std::vector<Value> tuple;
    std::function<void(std::size_t)> all = [&](std::size_t i) {
      if (i == decl->args.size()) {
        if (facts.predicate_value(pred, tuple) != Truth::false_) return;
        std::vector<Term> ts;
        for (const auto& a : tuple) ts.push_back(element(a));
        ax.push_back(Formula::lit(Literal(Atom::predicate(pred, ts), false)));
        return;
      }
      for (const auto& n : facts.elements(decl->args[i])) {
        tuple.push_back(Value::element(decl->args[i], n));
        all(i + 1);
        tuple.pop_back();
      }
    };
    all(0);
  }
  axioms_ = Formula::conj(std::move(ax));
}

Term Entailment::element(const Value& v) {
  if (v.number) return Term::number(*v.number, v.sort);
  return Term::apply("@" + v.name, {}, v.sort);
}

Truth Entailment::decide(const Formula& f, const Environment& env) {
  Substitution s;
  for (const auto& [key, val] : env) {
    bool prev = key.rfind("(prev ", 0) == 0;
    std::string name = prev ? key.substr(6, key.size() - 7) : key;
    Term var = prev ? Term::previous(name, val.sort) : Term::variable(name, val.sort);
    s.add(var, element(val));
  }
  Formula g = substitute(f, s);
  try {
    if (!theory_->is_satisfiable(Formula::conj({axioms_, negate(g)}))) return Truth::true_;
    if (!theory_->is_satisfiable(Formula::conj({axioms_, g}))) return Truth::false_;
  } catch (const UnsupportedError&) {
  }
  return Truth::unknown;
}

MonitorSession::MonitorSession(const Artifacts& art, const FactBase& facts, MonitorOptions opts)
    : art_(art), facts_(facts), opts_(std::move(opts)), state_(art.nfa.initial()) {
  if (!check_safe_lookback(art.nfa)) throw MonitorError("property does not have safe lookback");
  if (opts_.entailment) entail_ = std::make_unique<Entailment>(facts, opts_.entailment_theory);
}

MonitorSession::~MonitorSession() = default;

Truth MonitorSession::decide(const Formula& f, const Environment& env) {
  Truth t = eval_ground(f, facts_, env);
  if (t == Truth::unknown && entail_) t = entail_->decide(f, env);
  return t;
}

MonitorSession::Pick MonitorSession::pick(bool last, const Assignment* prev, const Assignment& curr) {
  Pick p;
  auto env = make_environment(prev, curr);
  bool undecided = false;
  for (int id : art_.nfa.outgoing(state_)) {
    const auto& t = art_.nfa.transitions()[id];
    if (last ? t.label.marker == Marker::not_last : (t.label.marker == Marker::last || t.last_step)) continue;
    Truth c = symbol_consistent(t.label, prev, curr, facts_, last);
    if (c == Truth::unknown) c = decide(t.label.formula(), env);
    if (c == Truth::false_) continue;
    if (c == Truth::unknown) {
      if (!undecided)
        for (const auto& l : t.label.literals)
          if (eval_ground(l, facts_, env) == Truth::unknown) {
            p.unknown = l.key();
            break;
          }
      undecided = true;
      continue;
    }
    if (p.transition >= 0 && art_.nfa.transitions()[p.transition].to != t.to)
      throw MonitorError("two consistent transitions from state " + art_.nfa.name(state_) + " at instant " +
                         std::to_string(steps_) + " (inconsistent fact base?)");
    if (p.transition < 0) p.transition = id;
  }
  if (p.transition >= 0) p.unknown.clear();
  else if (!undecided)
    throw MonitorError("no consistent transition from state " + art_.nfa.name(state_) + " at instant " +
                       std::to_string(steps_));
  return p;
}

Verdict MonitorSession::step(const Assignment& a) {
  const Assignment* prev = prev_ ? &*prev_ : nullptr;
  auto where = [&] { return "instant " + std::to_string(steps_) + ": "; };
  Pick end = pick(true, prev, a);
  if (end.transition < 0)
    throw InsufficientFacts(where() + "facts do not determine '" + end.unknown + "'", end.unknown);
  Pick go = pick(false, prev, a);
  if (go.transition < 0)
    throw InsufficientFacts(where() + "facts do not determine '" + go.unknown + "'", go.unknown);

  bool satisfied = art_.nfa.is_final(art_.nfa.transitions()[end.transition].to);
  int next = art_.nfa.transitions()[go.transition].to;
  const Formula& ext = satisfied ? art_.ext_viol[next] : art_.ext_sat[next];
  bool complete = satisfied ? art_.negative.complete : art_.positive.complete;
  Truth t = decide(ext, make_environment(nullptr, a));

  Verdict v;
  v.instant = steps_;
  v.state = next;
  if (t == Truth::true_) {
    v.kind = satisfied ? VerdictKind::cs : VerdictKind::cv;
  } else if (t == Truth::false_) {
    if (complete) v.kind = satisfied ? VerdictKind::ps : VerdictKind::pv;
    else {
      v.kind = satisfied ? VerdictKind::satisfied_so_far : VerdictKind::violated_so_far;
      v.detail = "graph incomplete: " + (satisfied ? art_.negative.diagnosis : art_.positive.diagnosis);
    }
  } else {
    throw InsufficientFacts(where() + "facts do not determine the extension condition " + ext.key(), ext.key());
  }
  state_ = next;
  prev_ = a;
  ++steps_;
  return v;
}

std::vector<Verdict> monitor_prefixes(const Artifacts& art, const Trace& tr, const MonitorOptions& opts) {
  if (tr.steps.empty()) throw MonitorError("empty trace");
  MonitorSession s(art, tr.facts, opts);
  std::vector<Verdict> out;
  for (const auto& a : tr.steps) out.push_back(s.step(a));
  return out;
}

Verdict monitor(const Artifacts& art, const Trace& tr, const MonitorOptions& opts) {
  return monitor_prefixes(art, tr, opts).back();
}

} // namespace datamon
