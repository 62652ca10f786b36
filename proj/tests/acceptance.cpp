// Acceptance checks; one PASS/FAIL line per criterion.

#include "support/brute_force.hpp"
#include "support/cover_oracle.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/precondition.hpp"

#include "datamon/coreach.hpp"
#include "datamon/errors.hpp"
#include "datamon/monitor.hpp"
#include "datamon/parser.hpp"
#include "datamon/trace_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace datamon;

namespace {

// Pinned thresholds.
constexpr double concert_seconds = 5.0;
constexpr int automaton_properties = 500;
constexpr int automaton_models = 3;
constexpr int trace_length = 4;
constexpr int model_size = 3;
constexpr int conjunctions_per_backend = 300;
constexpr int cover_model_size = 4;
constexpr std::size_t cover_exhaustive_models = 4096;
constexpr int cover_sampled_models = 300;
constexpr int solvability_properties = 50;
constexpr std::size_t solvability_max_size = 100;
constexpr double solvability_seconds = 600.0;
constexpr int soundness_cases = 200;
constexpr int soundness_extension_length = 3;
constexpr int soundness_fresh_elements = 2;
constexpr int path_length = 3;
constexpr int permanence_outcomes = 100;
constexpr int permanence_extensions = 3;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

bool verbose() { return std::getenv("ACCEPTANCE_VERBOSE") != nullptr; }

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::unique_ptr<Theory> theory(const Signature& sig, BackendKind k) {
  TheoryConfig cfg;
  cfg.backend = k;
  return make_theory(sig, cfg);
}

Signature concert_sig() { return parse_signature(fixtures::read_file(fixtures::data_path("concert/concert.sig"))); }

// 1. Verdicts on the concert example.
Outcome concert_verdicts() {
  auto start = Clock::now();
  auto sig = concert_sig();
  auto th = theory(sig, BackendKind::tame_combined);
  auto prop = [&](const std::string& n) {
    return parse_property(fixtures::read_file(fixtures::data_path("concert/" + n + ".prop")), sig);
  };
  auto trace = [&](const std::string& n) {
    return parse_trace_json(fixtures::read_file(fixtures::data_path("concert/traces/" + n + ".json")), sig);
  };
  auto psi = compile(prop("psi"), *th);
  auto t123 = compile(prop("psi_t123"), *th);
  struct Case {
    const Artifacts* art;
    std::string trace;
    VerdictKind want;
  };
  Outcome o;
  std::ostringstream d;
  for (const auto& c : {Case{&psi, "ex3_price100", VerdictKind::cs}, Case{&t123, "ex3_price80", VerdictKind::cv},
                        Case{&t123, "ex3_price100", VerdictKind::pv}}) {
    auto v = monitor(*c.art, trace(c.trace));
    d << to_string(v.kind) << " ";
    o.pass = o.pass && v.kind == c.want;
  }
  double secs = since(start);
  o.pass = o.pass && secs < concert_seconds;
  d << "(want cs cv pv) in " << secs << " s, limit " << concert_seconds << " s";
  o.detail = d.str();
  return o;
}

Signature small_euf() {
  return parse_signature(R"((sort D) (sort E) (const a D) (fun f (D) E) (pred P (D)) (pred Q (E)) (var d D) (var x E))");
}

std::vector<Property> atom_pool(const Signature& sig) {
  std::vector<Property> out;
  for (const char* t : {"(= x (f d))", "(P d)", "(Q x)", "(= d a)", "(= (prev x) x)", "(= (prev d) d)", "(Q (f (prev d)))"})
    out.push_back(parse_property(t, sig));
  return out;
}

/// Target of the single transition consistent with the step; throws when
/// there is none or several disagree.
int unique_step(const Nfa& a, int q, const Assignment* prev, const Assignment& curr, const FactBase& facts, bool last) {
  auto env = make_environment(prev, curr);
  std::set<int> targets;
  for (int id : a.outgoing(q)) {
    const auto& t = a.transitions()[id];
    if (last ? t.label.marker == Marker::not_last : (t.label.marker == Marker::last || t.last_step)) continue;
    bool ok = true;
    for (const auto& l : t.label.literals) {
      ok = !(prev == nullptr && l.mentions_prev()) && eval_ground(l, facts, env) == Truth::true_;
      if (!ok) break;
    }
    if (ok) targets.insert(t.to);
  }
  if (targets.size() != 1) throw MonitorError(std::to_string(targets.size()) + " consistent targets");
  return *targets.begin();
}

// 2. The unique run accepts exactly the traces satisfying the property.
Outcome automaton_correctness() {
  auto sig = small_euf();
  auto th = theory(sig, BackendKind::euf_acyclic);
  std::mt19937 rng(2024);
  gen::PropertyGen props(atom_pool(sig), 4, 4);
  std::size_t traces = 0, mismatches = 0, nondeterministic = 0;
  std::string first;
  for (int i = 0; i < automaton_properties; ++i) {
    auto p = props.safe(rng);
    NfaOptions opts;
    opts.delta.theory = th.get();
    auto a = build_nfa(p, opts);
    for (int m = 0; m < automaton_models; ++m) {
      auto fb = gen::random_model(sig, 1 + static_cast<int>(rng() % model_size), rng);
      auto all = gen::all_assignments(fb);
      Trace tr{fb, {}};
      std::function<void(int)> walk = [&](int q) {
        if (static_cast<int>(tr.steps.size()) == trace_length) return;
        for (const auto& s : all) {
          tr.steps.push_back(s);
          const Assignment* prev = tr.steps.size() > 1 ? &tr.steps[tr.steps.size() - 2] : nullptr;
          ++traces;
          try {
            bool accepted = a.is_final(unique_step(a, q, prev, s, fb, true));
            if (accepted != eval_semantics(tr, p)) {
              if (!mismatches++) first = p.key();
            }
            walk(unique_step(a, q, prev, s, fb, false));
          } catch (const MonitorError&) {
            if (!nondeterministic++ && first.empty()) first = p.key();
          }
          tr.steps.pop_back();
        }
      };
      walk(a.initial());
    }
  }
  Outcome o;
  o.pass = mismatches == 0 && nondeterministic == 0;
  std::ostringstream d;
  d << automaton_properties << " properties, " << traces << " traces, " << mismatches << " mismatches, "
    << nondeterministic << " determinism failures";
  if (!first.empty()) d << "; first: " << first;
  o.detail = d.str();
  return o;
}


struct CoverDomain {
  BackendKind backend;
  std::vector<std::string> decls;
  /// Terms per sort name, written as s-expressions.
  std::map<std::string, std::vector<std::string>> terms;
  std::vector<std::string> predicates;
  std::vector<std::string> sorts_with_order;
};

std::vector<CoverDomain> cover_domains() {
  return {
      {BackendKind::euf_acyclic,
       {"(sort D)", "(sort E)", "(const a D)", "(fun f (D) E)", "(pred P (D))", "(pred Q (E))", "(var d D)", "(var e D)",
        "(var x E)"},
       {{"D", {"d", "e", "a"}}, {"E", {"x", "(f d)", "(f e)", "(f a)"}}},
       {"(P d)", "(P e)", "(P a)", "(Q x)", "(Q (f d))", "(Q (f e))"},
       {}},
      {BackendKind::mc_dense,
       {"(sort Q :rational)", "(var x Q)", "(var y Q)", "(var z Q)"},
       {{"Q", {"x", "y", "z", "0", "1"}}},
       {},
       {"Q"}},
      {BackendKind::tame_combined,
       {"(sort D)", "(sort N :rational)", "(const c D)", "(fun h (D) N)", "(var d D)", "(var u N)", "(var v N)"},
       {{"D", {"d", "c"}}, {"N", {"u", "v", "(h d)", "(h c)", "0"}}},
       {},
       {"N"}},
  };
}

std::string join_decls(const std::vector<std::string>& decls, const std::set<std::string>* used = nullptr) {
  std::string out;
  for (const auto& d : decls) {
    std::istringstream in(d.substr(1));
    std::string kind, name;
    in >> kind >> name;
    if (!used || kind == "sort" || kind == "var" || used->count(name)) out += d + "\n";
  }
  return out;
}

std::set<std::string> symbols_of(const std::string& text) {
  std::set<std::string> out;
  std::string tok;
  for (char ch : text + " ") {
    if (ch == '(' || ch == ')' || ch == ' ') {
      if (!tok.empty()) out.insert(tok);
      tok.clear();
    } else {
      tok += ch;
    }
  }
  return out;
}

/// Random structure with every carrier of the given size, in the layout of
/// the model enumerator.
FiniteModel random_finite_model(const Signature& sig, int size, std::mt19937& rng) {
  FiniteModel m{FactBase(sig), {}};
  for (std::size_t i = 0; i < sig.sorts().size(); ++i) {
    SortId s = static_cast<SortId>(i);
    for (int k = 0; k < size; ++k) {
      if (sig.is_arithmetic(s)) {
        m.carrier[s].push_back(Value::numeric(s, k));
      } else {
        std::string name = sig.sort_name(s) + "!" + std::to_string(k);
        m.facts.add_element(s, name);
        m.carrier[s].push_back(Value::element(s, name));
      }
    }
  }
  auto any = [&](SortId s) { return m.carrier[s][rng() % m.carrier[s].size()]; };
  std::function<void(const std::vector<SortId>&, std::vector<Value>&, const std::function<void(std::vector<Value>&)>&)>
      tuples = [&](const std::vector<SortId>& sorts, std::vector<Value>& cur, const std::function<void(std::vector<Value>&)>& fn) {
        if (cur.size() == sorts.size()) return fn(cur);
        for (const auto& v : m.carrier[sorts[cur.size()]]) {
          cur.push_back(v);
          tuples(sorts, cur, fn);
          cur.pop_back();
        }
      };
  for (const auto& f : sig.functions()) {
    std::vector<Value> cur;
    tuples(f.args, cur, [&](std::vector<Value>& args) { m.facts.set_function(f.name, args, any(f.result)); });
  }
  for (const auto& p : sig.predicates()) {
    std::vector<Value> cur;
    tuples(p.args, cur, [&](std::vector<Value>& args) {
      if (rng() % 2) m.facts.set_predicate(p.name, args, true);
    });
    m.facts.close_predicate(p.name);
  }
  return m;
}

/// Random conjunction of at most 6 literals.
std::string random_conjunction(const CoverDomain& dom, std::mt19937& rng) {
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  int n = 1 + static_cast<int>(rng() % 6);
  std::string out = "(and";
  std::vector<std::string> sorts;
  for (const auto& [s, ts] : dom.terms) sorts.push_back(s);
  for (int i = 0; i < n; ++i) {
    std::string lit;
    if (!dom.predicates.empty() && rng() % 3 == 0) {
      lit = pick(dom.predicates);
    } else {
      std::string s = pick(sorts);
      std::string a = pick(dom.terms.at(s)), b = pick(dom.terms.at(s));
      bool ordered = std::find(dom.sorts_with_order.begin(), dom.sorts_with_order.end(), s) != dom.sorts_with_order.end();
      const char* op = ordered ? std::vector<const char*>{"=", "<", "<="}[rng() % 3] : "=";
      lit = std::string("(") + op + " " + a + " " + b + ")";
    }
    out += " " + (rng() % 2 ? lit : "(not " + lit + ")");
  }
  return out + ")";
}

// 3. Covers agree with the extension oracle; built-in order elimination
// agrees with the external solver.
Outcome cover_correctness() {
  std::mt19937 rng(99);
  bool z3 = std::system("command -v z3 >/dev/null 2>&1") == 0;
  std::size_t counterexamples = 0, qe_disagreements = 0, qe_compared = 0, exhaustive = 0, sampled = 0;
  std::ostringstream d;
  std::string first;
  for (const auto& dom : cover_domains()) {
    auto full = parse_signature(join_decls(dom.decls));
    auto th = theory(full, dom.backend);
    std::unique_ptr<Theory> ext;
    if (dom.backend == BackendKind::mc_dense && z3) ext = theory(full, BackendKind::external);
    std::size_t bad = 0;
    for (int i = 0; i < conjunctions_per_backend; ++i) {
      std::string text = random_conjunction(dom, rng);
      Formula f = parse_formula(text, full);
      std::vector<Term> ys;
      std::vector<std::string> names;
      for (const auto& v : full.variables())
        if (rng() % 2 || (ys.empty() && &v == &full.variables().back())) {
          ys.push_back(Term::variable(v.name, v.sort));
          names.push_back(v.name);
        }
      Formula cover = th->qe_cover(ys, f);
      auto used = symbols_of(text);
      auto small = parse_signature(join_decls(dom.decls, &used));
      Formula sf = parse_formula(text, small), sc = parse_formula(cover.key(), small);
      std::size_t n = 0;
      try {
        n = oracle::cover_mismatches(small, names, sf, sc, cover_model_size, cover_exhaustive_models);
        ++exhaustive;
      } catch (const ResourceError&) {
        n = oracle::cover_mismatches(small, names, sf, sc, cover_model_size - 1);
        auto dnf = to_dnf(sf);
        for (int k = 0; k < cover_sampled_models; ++k)
          n += oracle::cover_mismatches_in(random_finite_model(small, cover_model_size, rng), names, dnf, sc);
        ++sampled;
      }
      if (n && !bad++ && first.empty()) first = cover.key() + " of " + text;
      if (ext) {
        ++qe_compared;
        if (!ext->are_equivalent(cover, ext->qe_cover(ys, f))) {
          if (!qe_disagreements++ && first.empty()) first = "external QE differs on " + text;
        }
      }
    }
    counterexamples += bad;
    d << to_string(dom.backend) << " " << bad << "/" << conjunctions_per_backend << ", ";
  }
  Outcome o;
  o.pass = counterexamples == 0 && qe_disagreements == 0 && z3;
  d << exhaustive << " checked on all models up to size " << cover_model_size << ", " << sampled
    << " on all models up to size " << cover_model_size - 1 << " plus " << cover_sampled_models << " sampled of size "
    << cover_model_size << "; external QE " << qe_disagreements << "/" << qe_compared << " disagreements";
  if (!z3) d << " (z3 missing)";
  if (!first.empty()) d << "; first: " << first;
  o.detail = d.str();
  return o;
}

/// Conjunction of one or two specification templates (response, chain,
/// precedence, invariant, frame) over small boolean combinations of atoms.
Property specification_pattern(const std::vector<Property>& pool, std::mt19937& rng) {
  auto atom = [&] {
    Property a = pool[rng() % pool.size()];
    return rng() % 3 == 0 ? negate(a) : a;
  };
  auto cond = [&] {
    switch (rng() % 3) {
    case 0: return Property::conj(atom(), atom());
    case 1: return Property::disj(atom(), atom());
    default: return atom();
    }
  };
  auto implies = [](const Property& a, const Property& b) { return Property::disj(negate(a), b); };
  std::vector<Property> parts;
  int n = 1 + static_cast<int>(rng() % 2);
  for (int i = 0; i < n; ++i) {
    switch (rng() % 7) {
    case 0: parts.push_back(Property::always(implies(cond(), Property::eventually(cond())))); break;
    case 1: parts.push_back(Property::always(implies(cond(), Property::weak_next(cond())))); break;
    case 2: parts.push_back(Property::always(implies(cond(), Property::next(cond())))); break;
    case 3: parts.push_back(Property::until(negate(cond()), cond())); break;
    case 4: parts.push_back(Property::always(cond())); break;
    case 5: parts.push_back(Property::weak_next(Property::always(Property::conj(atom(), cond())))); break;
    default: parts.push_back(Property::always(implies(cond(), Property::until(cond(), cond())))); break;
    }
  }
  return Property::conj(std::move(parts));
}

// 4. Graph construction completes on the concert properties and generated
// properties with monotonicity constraints over the concert signature.
Outcome solvability() {
  auto start = Clock::now();
  auto sig = concert_sig();
  auto th = theory(sig, BackendKind::tame_combined);
  std::vector<Property> props;
  for (const char* n : {"psi", "psi_t123"})
    props.push_back(parse_property(fixtures::read_file(fixtures::data_path(std::string("concert/") + n + ".prop")), sig));
  std::vector<Property> pool;
  for (const char* t : {"(= t b)", "(= b undef)", "(= (con t) myc)", "(< (price t) (price b))",
                        "(<= (price (prev b)) (price t))", "(= (prev b) b)", "(< (price b) (price (prev t)))",
                        "(= (con b) (con t))", "(= (prev t) t123)"})
    pool.push_back(parse_property(t, sig));
  std::mt19937 rng(5);
  while (static_cast<int>(props.size()) < solvability_properties + 2) {
    auto p = specification_pattern(pool, rng);
    bool mc = true;
    for (const auto& l : collect_constraints(p)) mc = mc && is_monotonicity_constraint(l);
    if (mc && p.size() <= solvability_max_size) props.push_back(p);
  }
  Outcome o;
  o.pass = check_acyclic(sig) && check_tame(sig);
  std::size_t incomplete = 0, nodes = 0, largest = 0;
  std::string first;
  for (const auto& p : props) {
    auto t0 = Clock::now();
    if (verbose()) std::cerr << "compiling " << p.key() << "\n";
    auto art = compile(p, *th);
    if (verbose()) std::cerr << "  " << p.size() << " " << since(t0) << " s " << art.nfa.size() << " states " << p.key() << "\n";
    nodes += art.positive.nodes.size() + art.negative.nodes.size();
    largest = std::max(largest, p.size());
    if (!art.complete() && !incomplete++) first = p.key();
  }
  double secs = since(start);
  o.pass = o.pass && incomplete == 0 && secs < solvability_seconds;
  std::ostringstream d;
  d << props.size() << " properties (largest " << largest << " nodes), " << incomplete << " incomplete, " << nodes
    << " graph nodes, " << secs << " s, limit " << solvability_seconds << " s";
  if (!first.empty()) d << "; first: " << first;
  o.detail = d.str();
  return o;
}

// 5. Conclusive current verdicts have a witness extension; permanent ones
// have none within the bounds.
Outcome soundness() {
  auto sig = small_euf();
  auto th = theory(sig, BackendKind::euf_acyclic);
  std::mt19937 rng(31);
  gen::PropertyGen props(atom_pool(sig), 3, 4);
  std::map<std::string, int> kinds;
  std::size_t violations = 0, extensions = 0;
  std::string first;
  for (int i = 0; i < soundness_cases; ++i) {
    auto p = props.safe(rng);
    auto art = compile(p, *th);
    if (!art.complete()) throw ResourceError("incomplete graphs for " + p.key());
    auto fb = gen::random_model(sig, 1 + static_cast<int>(rng() % 2), rng);
    auto tr = gen::random_trace(fb, 1 + static_cast<int>(rng() % 3), rng);
    auto v = monitor(art, tr);
    auto o = oracle::brute_force_verdict(p, tr, soundness_extension_length, soundness_fresh_elements);
    extensions += o.extensions;
    ++kinds[to_string(v.kind)];
    if (o.kind != v.kind && !violations++)
      first = p.key() + ": monitor " + to_string(v.kind) + ", oracle " + to_string(o.kind);
  }
  Outcome o;
  o.pass = violations == 0;
  std::ostringstream d;
  d << soundness_cases << " cases (";
  for (const auto& [k, n] : kinds) d << k << " " << n << " ";
  d << "), " << extensions << " extensions tried, " << violations << " violations";
  if (!first.empty()) d << "; first: " << first;
  o.detail = d.str();
  return o;
}

/// Paths of at most max_len edges from each node toward the roots, folded
/// by regression and compared with the node formula.
std::pair<std::size_t, std::size_t> check_paths(const CoreachGraph& g, const Nfa& a, Theory& th, std::size_t max_len) {
  std::vector<std::vector<int>> out(g.nodes.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) out[g.edges[e].from].push_back(static_cast<int>(e));
  std::size_t paths = 0, bad = 0;
  std::vector<int> path;
  std::function<void(int, int)> walk = [&](int start, int node) {
    if (!path.empty()) {
      std::vector<Symbol> word;
      for (int e : path) word.push_back(a.transitions()[g.edges[e].transition].label);
      ++paths;
      if (!th.are_equivalent(oracle::fold_precondition(th, word, g.nodes[node].formula), g.nodes[start].formula)) ++bad;
    }
    if (path.size() == max_len) return;
    for (int e : out[node]) {
      path.push_back(e);
      walk(start, g.edges[e].to);
      path.pop_back();
    }
  };
  for (std::size_t n = 0; n < g.nodes.size(); ++n) walk(static_cast<int>(n), static_cast<int>(n));
  return {paths, bad};
}

// 6. Folded preconditions match graph nodes, and words are realizable
// exactly from the assignments satisfying their precondition.
Outcome precondition_suites() {
  std::size_t paths = 0, fold_bad = 0, instances = 0, consistency_bad = 0;
  auto graphs = [&](const Signature& sig, Theory& th, const std::vector<Property>& props) {
    NfaOptions opts;
    opts.delta.theory = &th;
    for (const auto& p : props) {
      auto a = build_nfa(p, opts);
      for (auto pol : {Polarity::positive, Polarity::negative}) {
        auto [n, bad] = check_paths(build_cg(a, th, pol), a, th, path_length);
        paths += n;
        fold_bad += bad;
      }
    }
    (void)sig;
  };
  auto concert = concert_sig();
  auto tame = theory(concert, BackendKind::tame_combined);
  std::vector<Property> cprops;
  for (const char* n : {"psi", "psi_t123"})
    cprops.push_back(parse_property(fixtures::read_file(fixtures::data_path(std::string("concert/") + n + ".prop")), concert));
  graphs(concert, *tame, cprops);

  auto sig = parse_signature("(sort D) (sort E) (const a D) (fun f (D) E) (pred P (D)) (pred Q (E)) (var d D) (var x E)");
  auto euf = theory(sig, BackendKind::euf_acyclic);
  std::vector<Property> props;
  for (const char* t : {"(= x (f a))", "(G (or (P d) (Q x)))", "(U (Q x) (= x (f d)))", "(X (R (= x (f (prev d))) (P d)))",
                        "(F (and (Q x) (X (not (= x (prev x))))))", "(U (P d) (and (= x (f d)) (X (Q (prev x)))))"})
    props.push_back(parse_property(t, sig));
  graphs(sig, *euf, props);

  auto mc = parse_signature("(sort Q :rational) (var x Q) (var y Q)");
  auto dense = theory(mc, BackendKind::mc_dense);
  std::vector<Property> mprops;
  for (const char* t : {"(G (< (prev x) x))", "(U (< x y) (X (= x (prev y))))", "(F (and (< y x) (X (<= x (prev y)))))"})
    mprops.push_back(parse_property(t, mc));
  graphs(mc, *dense, mprops);

  // Realizability on every model with carriers of size at most 2.
  for (const auto& p : props) {
    auto r = oracle::check_word_preconditions(sig, *euf, oracle::automaton_words(build_nfa(p), 2), 2);
    instances += r.checked;
    consistency_bad += r.mismatches;
  }
  for (const auto& p : mprops) {
    auto r = oracle::check_word_preconditions(mc, *dense, oracle::automaton_words(build_nfa(p), 2), 3);
    instances += r.checked;
    consistency_bad += r.mismatches;
  }
  Outcome o;
  o.pass = fold_bad == 0 && consistency_bad == 0 && paths > 0 && instances > 0;
  std::ostringstream d;
  d << paths << " graph paths up to length " << path_length << ", " << fold_bad << " fold mismatches; " << instances
    << " realizability instances, " << consistency_bad << " mismatches";
  o.detail = d.str();
  return o;
}

// 7. Permanent verdicts survive longer traces over extended structures.
Outcome permanence() {
  auto sig = small_euf();
  auto th = theory(sig, BackendKind::euf_acyclic);
  std::mt19937 rng(77);
  gen::PropertyGen props(atom_pool(sig), 3, 4);
  int outcomes = 0, ps = 0, pv = 0, flips = 0, tries = 0;
  std::string first;
  while (outcomes < permanence_outcomes) {
    if (++tries > 100 * permanence_outcomes) throw ResourceError("too few permanent verdicts generated");
    auto p = props.safe(rng);
    auto art = compile(p, *th);
    auto fb = gen::random_model(sig, 1 + static_cast<int>(rng() % 2), rng);
    auto tr = gen::random_trace(fb, 1 + static_cast<int>(rng() % 3), rng);
    auto v = monitor(art, tr);
    if (v.kind != VerdictKind::ps && v.kind != VerdictKind::pv) continue;
    ++outcomes;
    ++(v.kind == VerdictKind::ps ? ps : pv);
    for (int k = 0; k < permanence_extensions; ++k) {
      auto ext = gen::extend_model(fb, 1 + static_cast<int>(rng() % 2), rng, "z" + std::to_string(k));
      Trace longer{ext, tr.steps};
      auto more = gen::random_trace(ext, 1 + static_cast<int>(rng() % 3), rng);
      longer.steps.insert(longer.steps.end(), more.steps.begin(), more.steps.end());
      auto w = monitor(art, longer);
      if (w.kind != v.kind && !flips++) first = p.key() + ": " + to_string(v.kind) + " became " + to_string(w.kind);
    }
  }
  Outcome o;
  o.pass = flips == 0;
  std::ostringstream d;
  d << outcomes << " permanent outcomes (ps " << ps << ", pv " << pv << ") x " << permanence_extensions
    << " extensions, " << flips << " flips";
  if (!first.empty()) d << "; first: " << first;
  o.detail = d.str();
  return o;
}

} // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "concert verdicts", concert_verdicts},
      {2, "automaton correctness", automaton_correctness},
      {3, "cover correctness", cover_correctness},
      {4, "solvability", solvability},
      {5, "soundness sampling", soundness},
      {6, "precondition suites", precondition_suites},
      {7, "permanence", permanence},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << ": " << o.detail << " ["
              << since(start) << " s]" << std::endl;
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
