#include "datamon/theory.hpp"

#include "datamon/errors.hpp"
#include "datamon/smt.hpp"

#include <algorithm>
#include <functional>

namespace datamon {

const char* to_string(BackendKind k) {
  switch (k) {
  case BackendKind::euf_acyclic: return "euf-acyclic";
  case BackendKind::mc_dense: return "mc-dense";
  case BackendKind::tame_combined: return "tame-combined";
  case BackendKind::external: return "external";
  }
  return "?";
}

BackendKind parse_backend(const std::string& name) {
  if (name == "euf" || name == "euf-acyclic") return BackendKind::euf_acyclic;
  if (name == "mc" || name == "mc-dense") return BackendKind::mc_dense;
  if (name == "tame" || name == "tame-combined") return BackendKind::tame_combined;
  if (name == "external") return BackendKind::external;
  throw Error("unknown backend: " + name);
}

Deadline::Deadline(int ms) : enabled_(ms > 0), at_(std::chrono::steady_clock::now() + std::chrono::milliseconds(ms)) {}

void Deadline::check(const char* what) const {
  if (enabled_ && std::chrono::steady_clock::now() > at_)
    throw ResourceError(std::string("solver budget exceeded during ") + what);
}

// ---------------------------------------------------------------- signature analysis

std::string find_sort_cycle(const Signature& sig) {
  const int n = static_cast<int>(sig.sorts().size());
  std::vector<std::vector<int>> succ(n);
  for (const auto& f : sig.functions())
    for (auto a : f.args) succ[a].push_back(f.result);
  std::vector<int> color(n, 0), parent(n, -1);
  std::string cycle;
  std::function<bool(int)> dfs = [&](int v) {
    color[v] = 1;
    for (int w : succ[v]) {
      if (color[w] == 1) {
        std::vector<std::string> names{sig.sort_name(w)};
        for (int u = v; u != w && u >= 0; u = parent[u]) names.push_back(sig.sort_name(u));
        std::reverse(names.begin() + 1, names.end());
        for (const auto& s : names) cycle += s + " -> ";
        cycle += sig.sort_name(w);
        return true;
      }
      if (color[w] == 0) {
        parent[w] = v;
        if (dfs(w)) return true;
      }
    }
    color[v] = 2;
    return false;
  };
  for (int v = 0; v < n; ++v)
    if (color[v] == 0 && dfs(v)) break;
  return cycle;
}

bool check_acyclic(const Signature& sig) { return find_sort_cycle(sig).empty(); }

bool check_tame(const Signature& sig) {
  for (const auto& f : sig.functions())
    for (auto a : f.args)
      if (sig.is_arithmetic(a)) return false;
  return true;
}

bool is_monotonicity_constraint(const Literal& l) {
  for (const auto& t : l.atom().args()) {
    bool arith = false;
    std::function<void(const Term&)> scan = [&](const Term& u) {
      if (u.is_arith_builtin()) arith = true;
      for (const auto& a : u.args()) scan(a);
    };
    scan(t);
    if (arith) return false;
  }
  return true;
}

// ---------------------------------------------------------------- DNF

std::vector<std::vector<Literal>> to_dnf(const Formula& f, std::size_t cap) {
  switch (f.kind()) {
  case FormulaKind::truth: return {{}};
  case FormulaKind::falsity: return {};
  case FormulaKind::literal: return {{f.literal()}};
  case FormulaKind::disj: {
    std::vector<std::vector<Literal>> out;
    for (const auto& c : f.children()) {
      auto part = to_dnf(c, cap);
      out.insert(out.end(), part.begin(), part.end());
      if (out.size() > cap) throw ResourceError("DNF expansion exceeds cap");
    }
    return out;
  }
  case FormulaKind::conj: {
    std::vector<std::vector<Literal>> acc{{}};
    for (const auto& c : f.children()) {
      auto part = to_dnf(c, cap);
      std::vector<std::vector<Literal>> next;
      for (const auto& a : acc)
        for (const auto& b : part) {
          std::set<std::string> keys;
          std::vector<Literal> merged;
          bool clash = false;
          for (const auto* side : {&a, &b})
            for (const auto& l : *side)
              if (keys.insert(l.key()).second) merged.push_back(l);
          for (const auto& l : merged)
            if (keys.count(l.negated().key())) clash = true;
          if (!clash) next.push_back(std::move(merged));
          if (next.size() > cap) throw ResourceError("DNF expansion exceeds cap");
        }
      acc = std::move(next);
    }
    return acc;
  }
  }
  return {};
}

Formula simplify_dnf(std::vector<std::vector<Literal>> dnf) {
  std::vector<std::set<std::string>> keys;
  for (auto& c : dnf) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::sort(dnf.begin(), dnf.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  std::vector<Formula> parts;
  for (const auto& c : dnf) {
    std::set<std::string> k;
    for (const auto& l : c) k.insert(l.key());
    bool subsumed = false;
    for (const auto& prev : keys)
      if (std::includes(k.begin(), k.end(), prev.begin(), prev.end())) {
        subsumed = true;
        break;
      }
    if (subsumed) continue;
    keys.push_back(k);
    parts.push_back(Formula::conj_of(c));
  }
  return Formula::disj(std::move(parts));
}

// ---------------------------------------------------------------- backends

bool Theory::are_equivalent(const Formula& f1, const Formula& f2) {
  if (f1 == f2) return true;
  return !is_satisfiable(Formula::conj({f1, negate(f2)})) && !is_satisfiable(Formula::conj({f2, negate(f1)}));
}

namespace {

class BuiltinTheory : public Theory {
public:
  BuiltinTheory(const Signature& sig, TheoryConfig cfg) : Theory(sig, std::move(cfg)) {}

  void check_supported(const Formula& f) const override {
    std::vector<Literal> lits;
    f.collect_literals(lits);
    for (const auto& l : lits) check_literal(l);
  }

  bool is_satisfiable(const Formula& f) override {
    ++calls_;
    check_supported(f);
    Deadline deadline(cfg_.solver_timeout_ms);
    int budget = cfg_.iteration_cap;
    std::vector<Literal> lits;
    return search({f}, lits, deadline, budget);
  }

  Formula qe_cover(const std::vector<Term>& ys, const Formula& f) override {
    ++calls_;
    check_supported(f);
    Deadline deadline(cfg_.solver_timeout_ms);
    std::set<std::string> elim;
    for (const auto& y : ys) {
      if (y.kind() != TermKind::var) throw TypeError("only current-instant variables can be eliminated: " + y.key());
      elim.insert(y.key());
    }
    std::vector<std::vector<Literal>> out;
    for (const auto& conj : to_dnf(f)) {
      auto c = conjunction_cover(*sig_, conj, elim, deadline);
      for (auto& d : to_dnf(c)) out.push_back(std::move(d));
    }
    return simplify_dnf(std::move(out));
  }

private:
  void check_literal(const Literal& l) const {
    const auto& a = l.atom();
    for (const auto& t : a.args()) check_term(t, l);
    if (cfg_.backend == BackendKind::euf_acyclic && a.is_order())
      throw UnsupportedError("euf-acyclic backend does not support order atoms: " + l.key());
    if (cfg_.backend == BackendKind::mc_dense && a.kind() == AtomKind::pred)
      throw UnsupportedError("mc-dense backend supports only comparisons: " + l.key());
  }

  void check_term(const Term& t, const Literal& l) const {
    if (t.is_arith_builtin())
      throw UnsupportedError("atom is not a monotonicity constraint (use the external backend): " + l.key());
    if (sig_->sort(t.sort()).kind == SortKind::integer)
      throw UnsupportedError("integer-sorted constraints need the external backend: " + l.key());
    switch (cfg_.backend) {
    case BackendKind::euf_acyclic:
      if (t.kind() == TermKind::num)
        throw UnsupportedError("euf-acyclic backend does not support numerals: " + l.key());
      break;
    case BackendKind::mc_dense:
      if (!sig_->is_arithmetic(t.sort()) || (t.kind() == TermKind::app && !t.args().empty()))
        throw UnsupportedError("mc-dense backend supports rational variables and numerals only: " + l.key());
      break;
    default: break;
    }
    for (const auto& a : t.args()) check_term(a, l);
  }

  /// Tableau over the formula list: literals accumulate, disjunctions branch.
  bool search(std::vector<Formula> todo, std::vector<Literal>& lits, const Deadline& deadline, int& budget) {
    while (!todo.empty()) {
      Formula f = todo.back();
      todo.pop_back();
      switch (f.kind()) {
      case FormulaKind::truth: break;
      case FormulaKind::falsity: return false;
      case FormulaKind::literal: lits.push_back(f.literal()); break;
      case FormulaKind::conj:
        for (const auto& c : f.children()) todo.push_back(c);
        break;
      case FormulaKind::disj: {
        if (--budget < 0) throw ResourceError("satisfiability branch budget exhausted");
        if (!conjunction_satisfiable(*sig_, lits, deadline)) return false;
        for (const auto& c : f.children()) {
          auto branch_todo = todo;
          branch_todo.push_back(c);
          auto branch_lits = lits;
          if (search(std::move(branch_todo), branch_lits, deadline, budget)) return true;
        }
        return false;
      }
      }
    }
    return conjunction_satisfiable(*sig_, lits, deadline);
  }
};

} // namespace

std::unique_ptr<Theory> make_theory(const Signature& sig, const TheoryConfig& cfg) {
  switch (cfg.backend) {
  case BackendKind::euf_acyclic:
    if (auto cycle = find_sort_cycle(sig); !cycle.empty())
      throw UnsupportedError("euf-acyclic backend requires an acyclic signature; sort cycle: " + cycle);
    break;
  case BackendKind::tame_combined:
    if (!check_tame(sig)) throw UnsupportedError("tame-combined backend requires a tame signature");
    break;
  case BackendKind::mc_dense: break;
  case BackendKind::external: return make_external_theory(sig, cfg);
  }
  return std::make_unique<BuiltinTheory>(sig, cfg);
}

} // namespace datamon
