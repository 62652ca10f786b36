#pragma once

#include "datamon/automaton.hpp"
#include "datamon/coreach.hpp"
#include "datamon/theory.hpp"
#include "datamon/trace.hpp"

#include <optional>
#include <string>
#include <vector>

namespace datamon {

enum class VerdictKind {
  cs,
  ps,
  cv,
  pv,
  satisfied_so_far, ///< degraded: graph incomplete, no violating extension found
  violated_so_far,  ///< degraded: graph incomplete, no satisfying extension found
  inconclusive,
};

const char* to_string(VerdictKind k);
VerdictKind parse_verdict(const std::string& s);
/// cs 10, ps 0, cv 11, pv 1, degraded and inconclusive 2.
int exit_code(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  std::size_t instant = 0;
  int state = -1; ///< NFA state after the instant (non-last continuation)
  std::string detail;
};

/// NFA, both graphs and the Ext formula of every state.
struct Artifacts {
  Property property = Property::top();
  Nfa nfa;
  CoreachGraph positive, negative;
  std::vector<Formula> ext_sat, ext_viol;
  double seconds = 0;

  bool complete() const { return positive.complete && negative.complete; }
};

struct CompileOptions {
  NfaOptions nfa;
  CgOptions cg;
  bool theory_pruning = true;
};

Artifacts compile(const Property& p, Theory& th, const CompileOptions& opts = {});
/// Fills ext_sat/ext_viol from the graphs.
void compute_ext(Artifacts& art);

struct MonitorOptions {
  /// Decide atoms missing from the fact base by entailment from the facts.
  bool entailment = false;
  TheoryConfig entailment_theory;
};

/// Online MONITOR: one verdict per event, treating every prefix as complete.
class MonitorSession {
public:
  /// Throws MonitorError when the property does not have safe lookback.
  MonitorSession(const Artifacts& art, const FactBase& facts, MonitorOptions opts = {});
  ~MonitorSession();
  MonitorSession(const MonitorSession&) = delete;
  MonitorSession& operator=(const MonitorSession&) = delete;

  Verdict step(const Assignment& a);
  int state() const { return state_; }
  std::size_t steps() const { return steps_; }

private:
  struct Pick {
    int transition = -1;
    std::string unknown; ///< first undetermined constraint
  };
  Pick pick(bool last, const Assignment* prev, const Assignment& curr);
  Truth decide(const Formula& f, const Environment& env);

  const Artifacts& art_;
  const FactBase& facts_;
  MonitorOptions opts_;
  std::unique_ptr<class Entailment> entail_;
  int state_;
  std::size_t steps_ = 0;
  std::optional<Assignment> prev_;
};

/// Batch form: the verdict of the last prefix.
Verdict monitor(const Artifacts& art, const Trace& tr, const MonitorOptions& opts = {});
std::vector<Verdict> monitor_prefixes(const Artifacts& art, const Trace& tr, const MonitorOptions& opts = {});

/// Truth of a formula under an environment in every model of the fact base
/// (facts as axioms, declared elements pairwise distinct).
class Entailment {
public:
  Entailment(const FactBase& facts, const TheoryConfig& cfg);
  Truth decide(const Formula& f, const Environment& env);

private:
  Term element(const Value& v);
  std::unique_ptr<Signature> sig_;
  std::unique_ptr<Theory> theory_;
  Formula axioms_ = Formula::top();
};

} // namespace datamon
