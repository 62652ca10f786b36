#pragma once

#include "datamon/term.hpp"
#include "datamon/trace.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace datamon {

enum class BackendKind { euf_acyclic, mc_dense, tame_combined, external };

const char* to_string(BackendKind k);
/// Accepts "euf", "mc", "tame", "external" and the long names.
BackendKind parse_backend(const std::string& name);

struct TheoryConfig {
  BackendKind backend = BackendKind::tame_combined;
  /// Command line of the SMT solver for the external backend; empty means
  /// $DATAMON_SOLVER, falling back to "z3 -in".
  std::string solver_command;
  /// Wall-clock budget per theory call; 0 disables.
  int solver_timeout_ms = 60000;
  /// Cap on branches explored by a single cover or satisfiability call.
  int iteration_cap = 200000;
};

/// Wall-clock deadline checked by long-running loops.
class Deadline {
public:
  Deadline() = default;
  explicit Deadline(int ms);
  void check(const char* what) const;

private:
  bool enabled_ = false;
  std::chrono::steady_clock::time_point at_;
};

/// Sort graph analysis: an edge s -> s' for every f: ... s ... -> s'.
bool check_acyclic(const Signature& sig);
/// Names a sort cycle, or "" when the sort graph is acyclic.
std::string find_sort_cycle(const Signature& sig);
bool check_tame(const Signature& sig);
/// Every order/equality atom compares plain terms (no built-in arithmetic).
bool is_monotonicity_constraint(const Literal& l);

/// Theory reasoning modulo T (and T* for covers). Implementations are
/// single-caller; callers needing parallelism instantiate one each.
class Theory {
public:
  virtual ~Theory() = default;

  const Signature& signature() const { return *sig_; }
  const TheoryConfig& config() const { return cfg_; }

  /// Throws UnsupportedError when the formula is outside the backend's fragment.
  virtual void check_supported(const Formula& f) const = 0;
  virtual bool is_satisfiable(const Formula& f) = 0;
  /// Quantifier-free T*-equivalent of exists ys. f.
  virtual Formula qe_cover(const std::vector<Term>& ys, const Formula& f) = 0;
  bool are_equivalent(const Formula& f1, const Formula& f2);

  std::size_t calls() const { return calls_; }

protected:
  Theory(const Signature& sig, TheoryConfig cfg) : sig_(&sig), cfg_(std::move(cfg)) {}
  const Signature* sig_;
  TheoryConfig cfg_;
  std::size_t calls_ = 0;
};

/// Checks the backend's signature preconditions and builds it.
std::unique_ptr<Theory> make_theory(const Signature& sig, const TheoryConfig& cfg);

/// Conjunction-level engine shared by the built-in backends: congruence
/// closure plus a dense order over rational sorts.
bool conjunction_satisfiable(const Signature& sig, const std::vector<Literal>& lits, const Deadline& deadline);
Formula conjunction_cover(const Signature& sig, const std::vector<Literal>& lits, const std::set<std::string>& eliminated,
                          const Deadline& deadline);

/// Disjunctive normal form; conjuncts containing complementary literals are dropped.
std::vector<std::vector<Literal>> to_dnf(const Formula& f, std::size_t cap = 100000);

/// Removes duplicate and subsumed disjuncts of a DNF.
Formula simplify_dnf(std::vector<std::vector<Literal>> dnf);

/// Finite structure; a total fact base with every predicate closed.
struct FiniteModel {
  FactBase facts;
  std::map<SortId, std::vector<Value>> carrier;
};

/// Enumerates all structures with the given carrier size per sort. Arithmetic
/// sorts get the ordered carrier 0, 1, ..., n-1. The callback returns false to stop.
/// Throws ResourceError when more than max_models would be produced.
std::size_t enumerate_small_models(const Signature& sig, const std::map<SortId, int>& sizes,
                                   const std::function<bool(const FiniteModel&)>& fn,
                                   std::size_t max_models = 10000000);

/// All size combinations from 1 to size_bound per sort.
std::size_t enumerate_models_up_to(const Signature& sig, int size_bound, const std::function<bool(const FiniteModel&)>& fn,
                                   std::size_t max_models = 10000000);

} // namespace datamon
