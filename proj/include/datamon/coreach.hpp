#pragma once

#include "datamon/automaton.hpp"
#include "datamon/theory.hpp"

#include <string>
#include <vector>

namespace datamon {

enum class Polarity { positive, negative };

const char* to_string(Polarity p);

struct CgNode {
  int state;
  Formula formula;
};

struct CgEdge {
  int from;
  int to;
  int transition; ///< index into Nfa::transitions()
};

/// Coreachability (positive) or non-coreachability (negative) graph.
struct CoreachGraph {
  Polarity polarity = Polarity::positive;
  std::vector<CgNode> nodes;
  std::vector<CgEdge> edges;
  std::vector<std::vector<int>> by_state;
  /// False when a budget stopped the fixpoint; the graph is then partial.
  bool complete = true;
  std::string diagnosis;
  /// Formulas accumulated at the fastest-growing state, oldest first.
  std::vector<std::string> growth;
};

struct CgOptions {
  std::size_t max_nodes = 5000;
  /// Semantic dedup through are_equivalent after the key lookup.
  bool semantic_dedup = true;
  /// Nonzero: pick worklist items in a seeded random order.
  unsigned shuffle_seed = 0;
};

/// Quantifier-free cover of exists Y. [s](V/prev V, Y/V) & phi(Y/V).
Formula regress(Theory& th, const Formula& phi, const Symbol& s);

/// Roots: (q, true) for q in {<true>, q+} (positive) or {<false>, q-} (negative).
std::vector<int> cg_roots(const Nfa& a, Polarity p);

CoreachGraph build_cg(const Nfa& a, Theory& th, Polarity p, const CgOptions& opts = {});

/// Disjunction of the node formulas at q; false when there are none.
Formula ext_formula(const CoreachGraph& g, int q);

std::string cg_to_dot(const CoreachGraph& g, const Nfa& a);

/// Undirected graph over indexed variable copies "v@i" of a word. Only
/// positive atoms and order atoms contribute edges; equalities between plain
/// variables are collapsed.
struct ComputationGraph {
  std::vector<std::string> nodes;
  struct Edge {
    int a, b;
    bool cross; ///< endpoints at different instants
  };
  std::vector<Edge> edges;
  /// Collapsed class of every node, and the quotient edges.
  std::vector<int> class_of;
  int class_count = 0;
  std::vector<Edge> collapsed_edges;

  /// Longest acyclic path in the collapsed graph, counting cross-instant edges.
  int longest_path() const;
};

ComputationGraph computation_graph(const std::vector<Symbol>& w);

struct LookbackResult {
  bool holds = true;
  std::size_t words = 0;
  int longest = 0;
  /// Violating word, as transition indices.
  std::vector<int> witness;
};

/// Heuristic check of K-bounded lookback on all NFA words of length <= L.
/// Throws ResourceError after word_budget words.
LookbackResult bounded_lookback_check(const Nfa& a, int K, int L, std::size_t word_budget = 5000000);

} // namespace datamon
