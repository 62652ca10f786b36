#pragma once

#include "datamon/theory.hpp"

#include <memory>
#include <string>

namespace datamon {

/// Child process speaking the SMT-LIB text protocol over pipes.
class SmtProcess {
public:
  explicit SmtProcess(std::string command);
  ~SmtProcess();
  SmtProcess(const SmtProcess&) = delete;
  SmtProcess& operator=(const SmtProcess&) = delete;

  void send(const std::string& text);
  /// Reads one complete response (an atom line or a balanced s-expression).
  /// Throws ResourceError after timeout_ms and restarts the child.
  std::string read_response(int timeout_ms);

private:
  void start();
  void stop();

  std::string command_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

/// Backend delegating satisfiability and quantifier elimination to an
/// external solver (command from the config or DATAMON_SOLVER).
std::unique_ptr<Theory> make_external_theory(const Signature& sig, const TheoryConfig& cfg);

/// SMT-LIB rendering with signature-independent symbol names.
class SmtEncoder {
public:
  explicit SmtEncoder(const Signature& sig) : sig_(sig) {}

  std::string declarations(const std::vector<Term>& extra_vars, const Formula& f);
  std::string term(const Term& t);
  std::string formula(const Formula& f);
  std::string sort(SortId s) const;
  Formula decode(const std::string& text);

private:
  std::string literal(const Literal& l);
  std::string var_name(const Term& v);

  const Signature& sig_;
  std::map<std::string, Term> vars_by_name_;
  std::map<std::string, std::string> name_by_key_;
};

} // namespace datamon
