#include "datamon/coreach.hpp"

#include "datamon/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace datamon {

const char* to_string(Polarity p) { return p == Polarity::positive ? "positive" : "negative"; }

Formula regress(Theory& th, const Formula& phi, const Symbol& s) {
  const auto& sig = th.signature();
  Substitution on_symbol, on_phi;
  std::map<std::string, Term> fresh;
  for (const auto& v : sig.variables()) {
    Term y = Term::variable("#" + v.name, v.sort);
    fresh.emplace(y.key(), y);
    on_symbol.add(Term::variable(v.name, v.sort), y);
    on_symbol.add(Term::previous(v.name, v.sort), Term::variable(v.name, v.sort));
    on_phi.add(Term::variable(v.name, v.sort), y);
  }
  Formula body = Formula::conj({substitute(s.formula(), on_symbol), substitute(phi, on_phi)});
  if (body.is_bottom() || body.is_top()) return body;
  std::vector<Term> ys;
  for (const auto& k : body.variable_keys())
    if (auto it = fresh.find(k); it != fresh.end()) ys.push_back(it->second);
  if (ys.empty()) return body;
  return th.qe_cover(ys, body);
}

std::vector<int> cg_roots(const Nfa& a, Polarity p) {
  std::vector<int> roots;
  if (p == Polarity::positive) {
    roots.push_back(a.top_state());
    roots.push_back(a.accept_sink());
  } else {
    if (auto bottom = a.find_state(Property::bottom().key())) roots.push_back(*bottom);
    roots.push_back(a.reject_sink());
  }
  return roots;
}

namespace {

class CgBuilder {
public:
  CgBuilder(const Nfa& a, Theory& th, const CgOptions& opts, CoreachGraph& g)
      : a_(a), th_(th), opts_(opts), g_(g), rng_(opts.shuffle_seed) {
    g_.by_state.assign(a.size(), {});
  }

  void run(Polarity p) {
    try {
      for (int q : cg_roots(a_, p)) node_at(q, Formula::top());
      while (!work_.empty()) {
        int n = pop();
        expand(n);
      }
    } catch (const ResourceError& e) {
      stop(e.what());
    }
  }

private:
  int pop() {
    std::size_t i = 0;
    if (opts_.shuffle_seed != 0) i = std::uniform_int_distribution<std::size_t>(0, work_.size() - 1)(rng_);
    int n = work_[i];
    work_.erase(work_.begin() + static_cast<long>(i));
    return n;
  }

  /// Existing equivalent node at q, or a new one.
  int node_at(int q, const Formula& f) {
    auto& at = g_.by_state[q];
    for (int n : at)
      if (g_.nodes[n].formula == f) return n;
    if (opts_.semantic_dedup)
      for (int n : at)
        if (th_.are_equivalent(g_.nodes[n].formula, f)) return n;
    if (g_.nodes.size() >= opts_.max_nodes)
      throw ResourceError("coreachability graph exceeds " + std::to_string(opts_.max_nodes) + " nodes");
    int id = static_cast<int>(g_.nodes.size());
    g_.nodes.push_back({q, f});
    at.push_back(id);
    work_.push_back(id);
    return id;
  }

  void expand(int n) {
    int q = g_.nodes[n].state;
    for (int t : a_.incoming(q)) {
      const auto& tr = a_.transitions()[t];
      Formula r = regress_memo(g_.nodes[n].formula, tr.label);
      if (r.is_bottom() || !th_.is_satisfiable(r)) continue;
      int from = node_at(tr.from, r);
      if (edges_.insert({from, n, t}).second) g_.edges.push_back({from, n, t});
    }
  }

  Formula regress_memo(const Formula& phi, const Symbol& s) {
    auto key = std::make_pair(phi.key(), s.key());
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Formula r = regress(th_, phi, s);
    memo_.emplace(key, r);
    return r;
  }

  void stop(const std::string& why) {
    g_.complete = false;
    std::size_t worst = 0;
    for (std::size_t q = 1; q < g_.by_state.size(); ++q)
      if (g_.by_state[q].size() > g_.by_state[worst].size()) worst = q;
    g_.diagnosis = why + "; formulas keep growing at state " + a_.name(static_cast<int>(worst)) + " (" +
                   std::to_string(g_.by_state[worst].size()) + " nodes)";
    const auto& at = g_.by_state[worst];
    std::size_t first = at.size() > 5 ? at.size() - 5 : 0;
    for (std::size_t i = first; i < at.size(); ++i) g_.growth.push_back(g_.nodes[at[i]].formula.key());
  }

  const Nfa& a_;
  Theory& th_;
  const CgOptions& opts_;
  CoreachGraph& g_;
  std::mt19937 rng_;
  std::vector<int> work_;
  std::set<std::tuple<int, int, int>> edges_;
  std::map<std::pair<std::string, std::string>, Formula> memo_;
};

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

} // namespace

CoreachGraph build_cg(const Nfa& a, Theory& th, Polarity p, const CgOptions& opts) {
  CoreachGraph g;
  g.polarity = p;
  CgBuilder(a, th, opts, g).run(p);
  return g;
}

Formula ext_formula(const CoreachGraph& g, int q) {
  if (q < 0 || static_cast<std::size_t>(q) >= g.by_state.size()) return Formula::bottom();
  std::vector<Formula> parts;
  for (int n : g.by_state[q]) parts.push_back(g.nodes[n].formula);
  return Formula::disj(std::move(parts));
}

std::string cg_to_dot(const CoreachGraph& g, const Nfa& a) {
  std::ostringstream os;
  os << "digraph cg_" << to_string(g.polarity) << " {\n";
  for (std::size_t n = 0; n < g.nodes.size(); ++n)
    os << "  n" << n << " [label=\"" << dot_escape(a.name(g.nodes[n].state)) << "\\n"
       << dot_escape(g.nodes[n].formula.key()) << "\"];\n";
  for (const auto& e : g.edges) {
    const auto& label = a.transitions()[e.transition].label;
    std::string text;
    if (label.marker == Marker::last) text += "λ ";
    if (label.marker == Marker::not_last) text += "¬λ ";
    for (const auto& l : label.literals) text += l.key() + " ";
    os << "  n" << e.from << " -> n" << e.to << " [label=\"" << dot_escape(text) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

namespace {

bool contributes(const Literal& l) { return l.positive() || l.atom().is_order(); }

int longest_capped(const ComputationGraph& g, int cap) {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(g.class_count));
  for (const auto& e : g.collapsed_edges) {
    adj[e.a].push_back({e.b, e.cross ? 1 : 0});
    adj[e.b].push_back({e.a, e.cross ? 1 : 0});
  }
  int best = 0;
  std::vector<char> on(adj.size(), 0);
  std::function<void(int, int)> dfs = [&](int u, int len) {
    best = std::max(best, len);
    if (best > cap) return;
    on[u] = 1;
    for (auto [v, w] : adj[u])
      if (!on[v]) {
        dfs(v, len + w);
        if (best > cap) break;
      }
    on[u] = 0;
  };
  for (int s = 0; s < g.class_count && best <= cap; ++s) dfs(s, 0);
  return best;
}

} // namespace

int ComputationGraph::longest_path() const { return longest_capped(*this, std::numeric_limits<int>::max()); }

ComputationGraph computation_graph(const std::vector<Symbol>& w) {
  ComputationGraph g;
  std::map<std::string, int> index;
  std::vector<int> instant;
  auto node = [&](const Term& v, int i) {
    int at = v.kind() == TermKind::prev ? i - 1 : i;
    std::string k = v.name() + "@" + std::to_string(at);
    auto [it, fresh] = index.emplace(k, static_cast<int>(g.nodes.size()));
    if (fresh) {
      g.nodes.push_back(k);
      instant.push_back(at);
    }
    return it->second;
  };
  std::vector<std::pair<int, int>> merges;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (const auto& l : w[i].literals) {
      std::vector<int> vs;
      for (const auto& t : l.atom().args()) t.for_each_variable([&](const Term& v) { vs.push_back(node(v, static_cast<int>(i))); });
      if (!contributes(l)) continue;
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      const auto& args = l.atom().args();
      bool var_eq = l.positive() && l.atom().kind() == AtomKind::eq && args[0].is_variable() && args[1].is_variable();
      if (var_eq && vs.size() == 2) merges.push_back({vs[0], vs[1]});
      for (std::size_t x = 0; x < vs.size(); ++x)
        for (std::size_t y = x + 1; y < vs.size(); ++y)
          if (!var_eq) g.edges.push_back({vs[x], vs[y], instant[vs[x]] != instant[vs[y]]});
    }
  std::vector<int> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (auto [x, y] : merges) parent[find(x)] = find(y);
  std::map<int, int> cls;
  g.class_of.resize(g.nodes.size());
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    auto [it, fresh] = cls.emplace(find(static_cast<int>(n)), g.class_count);
    if (fresh) ++g.class_count;
    g.class_of[n] = it->second;
  }
  std::map<std::pair<int, int>, bool> quotient;
  for (const auto& e : g.edges) {
    int a = g.class_of[e.a], b = g.class_of[e.b];
    if (a == b) continue;
    auto& cross = quotient[{std::min(a, b), std::max(a, b)}];
    cross = cross || e.cross;
  }
  for (const auto& [ab, cross] : quotient) g.collapsed_edges.push_back({ab.first, ab.second, cross});
  return g;
}

LookbackResult bounded_lookback_check(const Nfa& a, int K, int L, std::size_t word_budget) {
  LookbackResult res;
  if (L <= 0) return res;
  // Transitions with the same graph effect and target are interchangeable.
  std::vector<std::vector<int>> choices(a.size());
  for (std::size_t q = 0; q < a.size(); ++q) {
    std::set<std::pair<std::string, int>> seen;
    for (int t : a.outgoing(static_cast<int>(q))) {
      const auto& tr = a.transitions()[t];
      std::string effect;
      for (const auto& l : tr.label.literals)
        if (contributes(l)) effect += l.key() + ";";
      if (seen.insert({effect, tr.to}).second) choices[q].push_back(t);
    }
  }
  std::vector<Symbol> word;
  std::vector<int> path;
  std::function<bool(int)> dfs = [&](int q) {
    for (int t : choices[q]) {
      if (++res.words > word_budget) throw ResourceError("lookback check exceeds word budget");
      word.push_back(a.transitions()[t].label);
      path.push_back(t);
      int len = longest_capped(computation_graph(word), K);
      res.longest = std::max(res.longest, len);
      if (len > K) {
        res.holds = false;
        res.witness = path;
        return true;
      }
      if (static_cast<int>(word.size()) < L && dfs(a.transitions()[t].to)) return true;
      word.pop_back();
      path.pop_back();
    }
    return false;
  };
  for (std::size_t q = 0; q < a.size(); ++q)
    if (dfs(static_cast<int>(q))) break;
  return res;
}

} // namespace datamon
