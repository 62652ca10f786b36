#pragma once

#include "datamon/property.hpp"
#include "datamon/theory.hpp"
#include "datamon/trace.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace datamon {

enum class Marker { none, last, not_last };

/// NFA edge label: a set of constraints from C± plus an optional marker for
/// the last instant (λ) or a non-last instant (¬λ).
struct Symbol {
  std::vector<Literal> literals;
  Marker marker = Marker::none;

  static Symbol of(const Literal& l) { return Symbol{{l}, Marker::none}; }
  static Symbol of(Marker m) { return Symbol{{}, m}; }

  /// Union; nullopt when it contains both λ and ¬λ or a literal and its negation.
  static std::optional<Symbol> merge(const Symbol& a, const Symbol& b);

  std::string key() const;
  Formula formula() const { return Formula::conj_of(literals); }
  bool mentions_prev() const;
  bool operator==(const Symbol& o) const { return key() == o.key(); }
};

enum class Pruning { none, syntactic, theory };

struct DeltaOptions {
  Pruning pruning = Pruning::theory;
  Theory* theory = nullptr;
};

/// δ over properties with memoization of results and of symbol satisfiability.
class DeltaEngine {
public:
  explicit DeltaEngine(DeltaOptions opts = {}) : opts_(opts) {}
  const std::vector<std::pair<Property, Symbol>>& delta(const Property& p);

private:
  using Pairs = std::vector<std::pair<Property, Symbol>>;
  Pairs product(const Pairs& a, const Pairs& b, bool conj);
  bool satisfiable(const Symbol& s);

  DeltaOptions opts_;
  std::map<std::string, Pairs> memo_;
  std::map<std::string, bool> sat_memo_;
};

struct Transition {
  int from;
  int to;
  Symbol label;
  /// Created from a λ-symbol (into q+ or q−); only consistent with the last instant.
  bool last_step = false;
};

class Nfa {
public:
  /// State 0 is the initial state.
  int initial() const { return 0; }
  int accept_sink() const { return accept_sink_; }
  int reject_sink() const { return reject_sink_; }
  int top_state() const { return top_state_; }
  std::size_t size() const { return names_.size(); }
  bool is_final(int q) const { return q == accept_sink_ || q == top_state_; }
  bool is_sink(int q) const { return q == accept_sink_ || q == reject_sink_; }
  const std::string& name(int q) const { return names_[q]; }
  /// Property of a quoted state; nullopt for q+ and q−.
  const std::optional<Property>& property(int q) const { return props_[q]; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<int>& outgoing(int q) const { return out_[q]; }
  const std::vector<int>& incoming(int q) const { return in_[q]; }
  std::optional<int> find_state(const std::string& key) const;

  int add_state(std::optional<Property> p, std::string name);
  void add_transition(Transition t);
  void set_sinks(int accept, int reject, int top) {
    accept_sink_ = accept;
    reject_sink_ = reject;
    top_state_ = top;
  }

private:
  std::vector<std::string> names_;
  std::vector<std::optional<Property>> props_;
  std::map<std::string, int> index_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<int>> out_, in_;
  int accept_sink_ = -1, reject_sink_ = -1, top_state_ = -1;
};

struct NfaOptions {
  DeltaOptions delta;
  std::size_t max_states = 10000;
};

/// Least fixpoint of δ-expansion from the initial property with λ-routing into q+/q−.
/// Throws ResourceError when the state cap is exceeded.
Nfa build_nfa(const Property& p, const NfaOptions& opts = {});

/// No initial-state edge mentions a lookback variable.
bool check_safe_lookback(const Nfa& a);

/// Consistency of a symbol with an instant: marker polarity and truth of its
/// constraints in the fact base (unknown when facts are missing).
Truth symbol_consistent(const Symbol& s, const Assignment* prev, const Assignment& curr, const FactBase& facts,
                        bool is_last);

std::string nfa_to_json(const Nfa& a);
std::string nfa_to_dot(const Nfa& a);
/// Inverse of nfa_to_json; constraints are re-read against the signature.
Nfa nfa_from_json(const std::string& text, const Signature& sig);

} // namespace datamon
