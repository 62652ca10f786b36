#include "datamon/errors.hpp"
#include "datamon/theory.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

namespace datamon {

namespace {

enum class Order { none, le, lt };

Order compose(Order a, Order b) {
  if (a == Order::none || b == Order::none) return Order::none;
  return (a == Order::lt || b == Order::lt) ? Order::lt : Order::le;
}

Order stronger(Order a, Order b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

struct PredFact {
  std::string name;
  std::vector<int> args;
  bool positive;
};

struct OrderFact {
  int lhs;
  int rhs;
  bool strict;
};

/// Congruence closure over the subterms of a literal set, extended with a
/// dense order over rational sorts.
class Closure {
public:
  Closure(const Signature& sig, const std::vector<Literal>& lits) : sig_(sig) {
    for (const auto& l : lits) {
      const auto& a = l.atom();
      std::vector<int> ids;
      for (const auto& t : a.args()) ids.push_back(intern(t));
      switch (a.kind()) {
      case AtomKind::eq:
        if (l.positive()) equalities_.push_back({ids[0], ids[1]});
        else disequalities_.push_back({ids[0], ids[1]});
        break;
      case AtomKind::lt: orders_.push_back({ids[0], ids[1], true}); break;
      case AtomKind::le: orders_.push_back({ids[0], ids[1], false}); break;
      case AtomKind::pred: preds_.push_back({a.name(), ids, l.positive()}); break;
      }
    }
    parent_.resize(terms_.size());
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  /// Runs to fixpoint; false when the literal set is T-unsatisfiable.
  bool close() {
    for (auto [a, b] : equalities_) merge(a, b);
    while (true) {
      congruence();
      if (!numerals_consistent()) return false;
      auto merged = order_fixpoint();
      if (!merged) return false;
      if (!*merged) break;
    }
    for (auto [a, b] : disequalities_)
      if (find(a) == find(b)) return false;
    for (std::size_t i = 0; i < preds_.size(); ++i)
      for (std::size_t j = i + 1; j < preds_.size(); ++j)
        if (preds_[i].positive != preds_[j].positive && preds_[i].name == preds_[j].name &&
            same_tuple(preds_[i].args, preds_[j].args))
          return false;
    compute_order_closure();
    for (const auto& [a, m] : order_)
      if (auto it = m.find(a); it != m.end() && it->second == Order::lt) return false;
    return true;
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<std::vector<int>>& args() const { return args_; }
  const std::vector<std::pair<int, int>>& disequalities() const { return disequalities_; }
  const std::vector<PredFact>& predicates() const { return preds_; }
  const std::vector<OrderFact>& order_facts() const { return all_orders_; }

  bool is_rational(int id) const { return sig_.sort(terms_[id].sort()).kind == SortKind::rational; }

  /// Transitive order relation between class representatives.
  Order order(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return Order::le;
    auto it = order_.find(a);
    if (it == order_.end()) return Order::none;
    auto jt = it->second.find(b);
    return jt == it->second.end() ? Order::none : jt->second;
  }

  bool strictly_ordered(int a, int b) { return order(a, b) == Order::lt || order(b, a) == Order::lt; }

private:
  int intern(const Term& t) {
    if (auto it = index_.find(t.key()); it != index_.end()) return it->second;
    std::vector<int> ids;
    for (const auto& a : t.args()) ids.push_back(intern(a));
    int id = static_cast<int>(terms_.size());
    terms_.push_back(t);
    args_.push_back(std::move(ids));
    index_[t.key()] = id;
    return id;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

  bool same_tuple(const std::vector<int>& x, const std::vector<int>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (find(x[i]) != find(y[i])) return false;
    return true;
  }

  void congruence() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<std::string, std::vector<int>>, int> table;
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        const auto& t = terms_[i];
        if (t.kind() != TermKind::app || t.args().empty()) continue;
        std::vector<int> key;
        for (int a : args_[i]) key.push_back(find(a));
        auto [it, inserted] = table.emplace(std::make_pair(t.name(), key), static_cast<int>(i));
        if (!inserted && find(it->second) != find(static_cast<int>(i))) {
          merge(it->second, static_cast<int>(i));
          changed = true;
        }
      }
    }
  }

  bool numerals_consistent() {
    std::map<int, Rational> value;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      if (terms_[i].kind() != TermKind::num) continue;
      int r = find(static_cast<int>(i));
      auto [it, inserted] = value.emplace(r, terms_[i].value());
      if (!inserted && it->second != terms_[i].value()) return false;
    }
    return true;
  }

  /// Order edges between classes, numeral ordering included.
  std::vector<OrderFact> class_edges() {
    std::vector<OrderFact> edges;
    for (const auto& o : orders_) edges.push_back({find(o.lhs), find(o.rhs), o.strict});
    std::map<SortId, std::map<Rational, int>> nums;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].kind() == TermKind::num) nums[terms_[i].sort()].emplace(terms_[i].value(), find(static_cast<int>(i)));
    for (const auto& [s, m] : nums) {
      int prev = -1;
      for (const auto& [v, id] : m) {
        if (prev >= 0) edges.push_back({prev, id, true});
        prev = id;
      }
    }
    return edges;
  }

  /// Merges every SCC of the order graph. Returns nullopt when a strict edge
  /// lies inside an SCC, otherwise whether anything was merged.
  std::optional<bool> order_fixpoint() {
    auto edges = class_edges();
    std::map<int, std::vector<int>> succ;
    std::set<int> nodes;
    for (const auto& e : edges) {
      succ[e.lhs].push_back(e.rhs);
      nodes.insert(e.lhs);
      nodes.insert(e.rhs);
    }
    std::map<int, int> comp;
    std::map<int, int> low, num;
    std::vector<int> stack;
    std::set<int> on_stack;
    int counter = 0, ncomp = 0;
    std::function<void(int)> dfs = [&](int v) {
      num[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack.insert(v);
      for (int w : succ[v]) {
        if (!num.count(w)) {
          dfs(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack.count(w)) {
          low[v] = std::min(low[v], num[w]);
        }
      }
      if (low[v] == num[v]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack.erase(w);
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
    };
    for (int v : nodes)
      if (!num.count(v)) dfs(v);
    for (const auto& e : edges)
      if (e.strict && comp[e.lhs] == comp[e.rhs]) return std::nullopt;
    bool merged = false;
    std::map<int, int> first;
    for (int v : nodes) {
      auto [it, inserted] = first.emplace(comp[v], v);
      if (!inserted && find(it->second) != find(v)) {
        merge(it->second, v);
        merged = true;
      }
    }
    all_orders_ = edges;
    return merged;
  }

  void compute_order_closure() {
    order_.clear();
    auto edges = class_edges();
    all_orders_ = edges;
    std::set<int> nodes;
    for (const auto& e : edges) {
      nodes.insert(e.lhs);
      nodes.insert(e.rhs);
      auto& slot = order_[e.lhs][e.rhs];
      slot = stronger(slot, e.strict ? Order::lt : Order::le);
    }
    for (int k : nodes)
      for (int i : nodes) {
        Order ik = order_[i][k];
        if (ik == Order::none) continue;
        for (int j : nodes) {
          Order c = compose(ik, order_[k][j]);
          if (c != Order::none) order_[i][j] = stronger(order_[i][j], c);
        }
      }
  }

  const Signature& sig_;
  std::vector<Term> terms_;
  std::vector<std::vector<int>> args_;
  std::map<std::string, int> index_;
  std::vector<int> parent_;
  std::vector<std::pair<int, int>> equalities_;
  std::vector<std::pair<int, int>> disequalities_;
  std::vector<OrderFact> orders_;
  std::vector<OrderFact> all_orders_;
  std::vector<PredFact> preds_;
  std::map<int, std::map<int, Order>> order_;
};

bool mentions_any(const Term& t, const std::set<std::string>& vars) {
  bool hit = false;
  t.for_each_variable([&](const Term& v) { hit = hit || vars.count(v.key()) > 0; });
  return hit;
}

bool better_rep(const Term& a, const Term& b) {
  bool na = a.kind() == TermKind::num, nb = b.kind() == TermKind::num;
  if (na != nb) return na;
  if (a.size() != b.size()) return a.size() < b.size();
  bool ca = a.kind() == TermKind::app, cb = b.kind() == TermKind::app;
  if (ca != cb) return ca;
  return a.key() < b.key();
}

struct CoverState {
  const Signature& sig;
  const std::set<std::string>& eliminated;
  const Deadline& deadline;
  int branches = 0;
};

Formula cover_rec(CoverState& st, std::vector<Literal> lits);

/// Pair of classes that a witness must keep apart but whose order is open;
/// returns the literals of the case split.
std::optional<std::vector<std::vector<Literal>>> find_split(Closure& c, const std::vector<bool>& representable,
                                                             std::vector<Formula>& clauses,
                                                             const std::map<int, Term>& reps) {
  // A class without a representative that cannot be pinned between two
  // non-strict bounds ranges over an infinite interval and avoids any value.
  auto pinnable = [&](int y) {
    bool lower = false, upper = false;
    for (int z = 0; z < static_cast<int>(c.terms().size()); ++z) {
      int r = c.find(z);
      if (r == y) continue;
      if (c.order(r, y) == Order::le) lower = true;
      if (c.order(y, r) == Order::le) upper = true;
    }
    return lower && upper;
  };
  auto open_rational = [&](int a, int b) {
    a = c.find(a);
    b = c.find(b);
    if (a == b || !c.is_rational(a) || c.strictly_ordered(a, b)) return false;
    if (representable[a] && representable[b]) return false;
    if (!representable[a] && !pinnable(a)) return false;
    if (!representable[b] && !pinnable(b)) return false;
    return true;
  };
  auto split = [&](int a, int b, bool with_equal) {
    const Term& ta = c.terms()[a];
    const Term& tb = c.terms()[b];
    std::vector<std::vector<Literal>> cases = {{Literal(Atom::less(ta, tb), true)}, {Literal(Atom::less(tb, ta), true)}};
    if (with_equal) cases.push_back({Literal(Atom::equal(ta, tb), true)});
    return cases;
  };
  for (auto [a, b] : c.disequalities())
    if (open_rational(a, b)) return split(a, b, false);
  const auto& preds = c.predicates();
  for (std::size_t i = 0; i < preds.size(); ++i)
    for (std::size_t j = 0; j < preds.size(); ++j) {
      const auto& p = preds[i];
      const auto& n = preds[j];
      if (!p.positive || n.positive || p.name != n.name) continue;
      bool separable = false, all_rep = true;
      std::optional<std::pair<int, int>> open;
      std::vector<Formula> differ;
      for (std::size_t k = 0; k < p.args.size(); ++k) {
        int a = c.find(p.args[k]), b = c.find(n.args[k]);
        if (!representable[a] || !representable[b]) all_rep = false;
        if (a == b) continue;
        if (c.is_rational(a)) {
          if (c.strictly_ordered(a, b)) separable = true;
          else if (!representable[a] || !representable[b]) {
            if (open_rational(a, b)) open = {a, b};
            else separable = true;
          }
          else differ.push_back(Formula::lit(Literal(Atom::equal(reps.at(a), reps.at(b)), false)));
        } else if (!representable[a] || !representable[b]) {
          separable = true;
        } else {
          differ.push_back(Formula::lit(Literal(Atom::equal(reps.at(a), reps.at(b)), false)));
        }
      }
      if (separable || all_rep) continue;
      if (open) return split(open->first, open->second, true);
      clauses.push_back(Formula::disj(std::move(differ)));
    }
  return std::nullopt;
}

Formula cover_rec(CoverState& st, std::vector<Literal> lits) {
  st.deadline.check("cover");
  Closure c(st.sig, lits);
  if (!c.close()) return Formula::bottom();
  const auto& terms = c.terms();
  const int n = static_cast<int>(terms.size());

  for (int i = 0; i < n; ++i) {
    const auto& t = terms[i];
    if (t.kind() != TermKind::app || t.args().empty() || !mentions_any(t, st.eliminated)) continue;
    if (t.is_arith_builtin()) throw UnsupportedError("built-in arithmetic needs the external backend: " + t.key());
    if (t.args().size() > 1)
      throw UnsupportedError("cover over functions of arity > 1 applied to eliminated terms: " + t.key());
    if (st.sig.is_arithmetic(t.args()[0].sort()))
      throw UnsupportedError("cover over functions with arithmetic arguments (signature not tame): " + t.key());
  }

  // Representatives: the best term over surviving symbols denoting each class.
  std::map<int, Term> reps;
  std::vector<std::optional<Term>> candidate(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      const auto& t = terms[i];
      std::optional<Term> cand;
      if (t.kind() == TermKind::num || (t.is_variable() && !st.eliminated.count(t.key())) ||
          (t.kind() == TermKind::app && t.args().empty())) {
        cand = t;
      } else if (t.kind() == TermKind::app) {
        std::vector<Term> args;
        bool ok = true;
        for (int a : c.args()[i]) {
          auto it = reps.find(c.find(a));
          if (it == reps.end()) {
            ok = false;
            break;
          }
          args.push_back(it->second);
        }
        if (ok) cand = Term::apply(t.name(), std::move(args), t.sort());
      }
      if (!cand) continue;
      candidate[i] = cand;
      int r = c.find(i);
      auto it = reps.find(r);
      if (it == reps.end() || better_rep(*cand, it->second)) {
        reps.insert_or_assign(r, *cand);
        changed = true;
      }
    }
  }
  std::vector<bool> representable(n, false);
  for (int i = 0; i < n; ++i) representable[i] = reps.count(c.find(i)) > 0;

  std::vector<Formula> clauses;
  if (auto cases = find_split(c, representable, clauses, reps)) {
    if (++st.branches > 100000) throw ResourceError("cover case split budget exhausted");
    std::vector<Formula> parts;
    for (auto& extra : *cases) {
      auto next = lits;
      next.insert(next.end(), extra.begin(), extra.end());
      parts.push_back(cover_rec(st, std::move(next)));
    }
    return Formula::disj(std::move(parts));
  }

  std::vector<Formula> out = std::move(clauses);
  auto emit = [&](const Literal& l) { out.push_back(Formula::lit(l)); };
  for (int i = 0; i < n; ++i) {
    if (!candidate[i]) continue;
    const Term& rep = reps.at(c.find(i));
    if (*candidate[i] != rep) emit(Literal(Atom::equal(*candidate[i], rep), true));
  }
  for (auto [a, b] : c.disequalities()) {
    int ra = c.find(a), rb = c.find(b);
    if (representable[ra] && representable[rb]) emit(Literal(Atom::equal(reps.at(ra), reps.at(rb)), false));
  }
  for (const auto& p : c.predicates()) {
    std::vector<Term> args;
    bool ok = true;
    for (int a : p.args) {
      auto it = reps.find(c.find(a));
      if (it == reps.end()) {
        ok = false;
        break;
      }
      args.push_back(it->second);
    }
    if (ok) emit(Literal(Atom::predicate(p.name, std::move(args)), p.positive));
  }

  // Fourier-Motzkin over the order graph: drop classes without a representative.
  std::map<std::pair<int, int>, bool> edges;
  for (const auto& e : c.order_facts()) {
    int a = c.find(e.lhs), b = c.find(e.rhs);
    if (a == b) continue;
    auto [it, inserted] = edges.emplace(std::make_pair(a, b), e.strict);
    if (!inserted) it->second = it->second || e.strict;
  }
  std::set<int> doomed;
  for (const auto& [ab, s] : edges) {
    if (!representable[ab.first]) doomed.insert(ab.first);
    if (!representable[ab.second]) doomed.insert(ab.second);
  }
  for (int y : doomed) {
    std::vector<std::pair<int, bool>> lower, upper;
    for (auto it = edges.begin(); it != edges.end();) {
      if (it->first.second == y) lower.push_back({it->first.first, it->second});
      if (it->first.first == y) upper.push_back({it->first.second, it->second});
      if (it->first.first == y || it->first.second == y) it = edges.erase(it);
      else ++it;
    }
    for (auto [l, ls] : lower)
      for (auto [u, us] : upper) {
        if (l == u) {
          if (ls || us) return Formula::bottom();
          continue;
        }
        auto [it, inserted] = edges.emplace(std::make_pair(l, u), ls || us);
        if (!inserted) it->second = it->second || ls || us;
      }
  }
  for (const auto& [ab, strict] : edges) {
    const Term& a = reps.at(ab.first);
    const Term& b = reps.at(ab.second);
    if (a.kind() == TermKind::num && b.kind() == TermKind::num) continue;
    emit(Literal(strict ? Atom::less(a, b) : Atom::less_equal(a, b), true));
  }
  return Formula::conj(std::move(out));
}

} // namespace

bool conjunction_satisfiable(const Signature& sig, const std::vector<Literal>& lits, const Deadline& deadline) {
  deadline.check("satisfiability");
  Closure c(sig, lits);
  return c.close();
}

Formula conjunction_cover(const Signature& sig, const std::vector<Literal>& lits, const std::set<std::string>& eliminated,
                          const Deadline& deadline) {
  CoverState st{sig, eliminated, deadline};
  return cover_rec(st, lits);
}

} // namespace datamon
