#include "datamon/smt.hpp"

#include "datamon/errors.hpp"
#include "datamon/sexpr.hpp"

#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace datamon {

// ---------------------------------------------------------------- process

SmtProcess::SmtProcess(std::string command) : command_(std::move(command)) { start(); }

SmtProcess::~SmtProcess() { stop(); }

void SmtProcess::start() {
  int in[2], out[2];
  if (pipe(in) != 0 || pipe(out) != 0) throw Error("cannot create pipes for the solver");
  pid_ = fork();
  if (pid_ < 0) throw Error("cannot fork the solver");
  if (pid_ == 0) {
    dup2(in[0], 0);
    dup2(out[1], 1);
    dup2(out[1], 2);
    close(in[1]);
    close(out[0]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
  signal(SIGPIPE, SIG_IGN);
}

void SmtProcess::stop() {
  if (pid_ <= 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

void SmtProcess::send(const std::string& text) {
  const char* p = text.data();
  std::size_t left = text.size();
  while (left > 0) {
    ssize_t n = write(to_child_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("solver process closed its input: " + command_);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

namespace {

/// Length of the first complete response in buf, or 0.
std::size_t complete_response(const std::string& buf) {
  std::size_t i = 0;
  while (i < buf.size() && std::isspace(static_cast<unsigned char>(buf[i]))) ++i;
  if (i == buf.size()) return 0;
  if (buf[i] != '(') {
    auto nl = buf.find('\n', i);
    return nl == std::string::npos ? 0 : nl + 1;
  }
  int depth = 0;
  bool quoted = false, string = false;
  for (; i < buf.size(); ++i) {
    char c = buf[i];
    if (string) {
      if (c == '"') string = false;
      continue;
    }
    if (quoted) {
      if (c == '|') quoted = false;
      continue;
    }
    if (c == '"') string = true;
    else if (c == '|') quoted = true;
    else if (c == '(') ++depth;
    else if (c == ')' && --depth == 0) return i + 1;
  }
  return 0;
}

} // namespace

std::string SmtProcess::read_response(int timeout_ms) {
  auto start_time = std::chrono::steady_clock::now();
  while (true) {
    if (auto n = complete_response(buffer_)) {
      std::string r = buffer_.substr(0, n);
      buffer_.erase(0, n);
      auto b = r.find_first_not_of(" \t\r\n");
      auto e = r.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? "" : r.substr(b, e - b + 1);
    }
    int wait = -1;
    if (timeout_ms > 0) {
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_time);
      wait = static_cast<int>(timeout_ms - elapsed.count());
      if (wait <= 0) {
        stop();
        start();
        throw ResourceError("external solver timed out");
      }
    }
    pollfd pfd{from_child_, POLLIN, 0};
    int rc = poll(&pfd, 1, wait);
    if (rc < 0 && errno == EINTR) continue;
    if (rc <= 0) continue;
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n <= 0) {
      stop();
      start();
      throw Error("external solver exited unexpectedly: " + command_);
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

// ---------------------------------------------------------------- encoding

std::string SmtEncoder::sort(SortId s) const {
  switch (sig_.sort(s).kind) {
  case SortKind::rational: return "Real";
  case SortKind::integer: return "Int";
  case SortKind::uninterpreted: break;
  }
  return "S" + std::to_string(s);
}

std::string SmtEncoder::var_name(const Term& v) {
  auto it = name_by_key_.find(v.key());
  if (it != name_by_key_.end()) return it->second;
  std::string name = "v" + std::to_string(name_by_key_.size());
  name_by_key_[v.key()] = name;
  vars_by_name_.emplace(name, v);
  return name;
}

std::string SmtEncoder::declarations(const std::vector<Term>& extra_vars, const Formula& f) {
  std::string out;
  for (std::size_t i = 0; i < sig_.sorts().size(); ++i)
    if (!sig_.is_arithmetic(static_cast<SortId>(i))) out += "(declare-sort S" + std::to_string(i) + " 0)\n";
  for (std::size_t i = 0; i < sig_.functions().size(); ++i) {
    const auto& fn = sig_.functions()[i];
    out += "(declare-fun f" + std::to_string(i) + " (";
    for (std::size_t k = 0; k < fn.args.size(); ++k) out += (k ? " " : "") + sort(fn.args[k]);
    out += ") " + sort(fn.result) + ")\n";
  }
  for (std::size_t i = 0; i < sig_.predicates().size(); ++i) {
    const auto& p = sig_.predicates()[i];
    out += "(declare-fun p" + std::to_string(i) + " (";
    for (std::size_t k = 0; k < p.args.size(); ++k) out += (k ? " " : "") + sort(p.args[k]);
    out += ") Bool)\n";
  }
  std::map<std::string, Term> vars;
  for (const auto& v : extra_vars) vars.emplace(v.key(), v);
  std::vector<Literal> lits;
  f.collect_literals(lits);
  for (const auto& l : lits)
    for (const auto& t : l.atom().args()) t.for_each_variable([&](const Term& v) { vars.emplace(v.key(), v); });
  for (const auto& [k, v] : vars) out += "(declare-fun " + var_name(v) + " () " + sort(v.sort()) + ")\n";
  return out;
}

namespace {

std::string index_name(char prefix, const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return prefix + std::to_string(i);
  throw Error("symbol not in signature: " + name);
}

std::string smt_number(const Rational& r, bool real) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  std::string s;
  if (real) s = den == 1 ? num.str() + ".0" : "(/ " + num.str() + ".0 " + den.str() + ".0)";
  else s = num.str();
  return neg ? "(- " + s + ")" : s;
}

} // namespace

std::string SmtEncoder::term(const Term& t) {
  switch (t.kind()) {
  case TermKind::var:
  case TermKind::prev: return var_name(t);
  case TermKind::num: return smt_number(t.value(), sig_.sort(t.sort()).kind != SortKind::integer);
  case TermKind::app: break;
  }
  std::string head;
  if (t.is_arith_builtin()) {
    head = t.name();
  } else {
    std::vector<std::string> names;
    for (const auto& f : sig_.functions()) names.push_back(f.name);
    head = index_name('f', names, t.name());
  }
  if (t.args().empty()) return head;
  std::string out = "(" + head;
  for (const auto& a : t.args()) out += " " + term(a);
  return out + ")";
}

std::string SmtEncoder::literal(const Literal& l) {
  const auto& a = l.atom();
  std::string s;
  switch (a.kind()) {
  case AtomKind::eq: s = "(= " + term(a.args()[0]) + " " + term(a.args()[1]) + ")"; break;
  case AtomKind::lt: s = "(< " + term(a.args()[0]) + " " + term(a.args()[1]) + ")"; break;
  case AtomKind::le: s = "(<= " + term(a.args()[0]) + " " + term(a.args()[1]) + ")"; break;
  case AtomKind::pred: {
    std::vector<std::string> names;
    for (const auto& p : sig_.predicates()) names.push_back(p.name);
    s = index_name('p', names, a.name());
    if (!a.args().empty()) {
      std::string r = "(" + s;
      for (const auto& t : a.args()) r += " " + term(t);
      s = r + ")";
    }
    break;
  }
  }
  return l.positive() ? s : "(not " + s + ")";
}

std::string SmtEncoder::formula(const Formula& f) {
  switch (f.kind()) {
  case FormulaKind::truth: return "true";
  case FormulaKind::falsity: return "false";
  case FormulaKind::literal: return literal(f.literal());
  case FormulaKind::conj:
  case FormulaKind::disj: {
    std::string out = f.kind() == FormulaKind::conj ? "(and" : "(or";
    for (const auto& c : f.children()) out += " " + formula(c);
    return out + ")";
  }
  }
  return "true";
}

// ---------------------------------------------------------------- decoding

namespace {

class Decoder {
public:
  Decoder(const Signature& sig, const std::map<std::string, Term>& vars) : sig_(sig), vars_(vars) {}

  SExpr expand(const SExpr& e, const std::map<std::string, SExpr>& env) {
    if (e.is_atom) {
      auto it = env.find(e.atom);
      return it == env.end() ? e : it->second;
    }
    if (e.head() == "let" && e.items.size() == 3) {
      auto inner = env;
      for (const auto& b : e.items[1].items) {
        if (b.items.size() != 2) throw Error("malformed let binding from solver");
        inner[b.items[0].atom] = expand(b.items[1], env);
      }
      return expand(e.items[2], inner);
    }
    SExpr out = e;
    for (auto& i : out.items) i = expand(i, env);
    return out;
  }

  Formula formula(const SExpr& e, bool positive) {
    if (e.is_atom) {
      if (e.atom == "true") return positive ? Formula::top() : Formula::bottom();
      if (e.atom == "false") return positive ? Formula::bottom() : Formula::top();
      return Formula::lit(Literal(atom(e), positive));
    }
    const std::string h = e.head();
    if (h == "not") return formula(e.items.at(1), !positive);
    if (h == "and" || h == "or") {
      std::vector<Formula> parts;
      for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(formula(e.items[i], positive));
      return (h == "and") == positive ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    if (h == "=>") {
      if (positive) return Formula::disj({formula(e.items.at(1), false), formula(e.items.at(2), true)});
      return Formula::conj({formula(e.items.at(1), true), formula(e.items.at(2), false)});
    }
    if (h == "distinct") return Formula::lit(Literal(atom(e), !positive));
    return Formula::lit(Literal(atom(e), positive));
  }

private:
  std::optional<SortId> infer(const SExpr& e) {
    if (e.is_atom) {
      if (auto it = vars_.find(e.atom); it != vars_.end()) return it->second.sort();
      if (auto f = function(e.atom)) return f->result;
      return std::nullopt;
    }
    if (auto f = function(e.head())) return f->result;
    for (std::size_t i = 1; i < e.items.size(); ++i)
      if (auto s = infer(e.items[i])) return s;
    return std::nullopt;
  }

  const FunctionDecl* function(const std::string& name) {
    if (name.size() < 2 || name[0] != 'f') return nullptr;
    auto idx = std::strtoul(name.c_str() + 1, nullptr, 10);
    return idx < sig_.functions().size() ? &sig_.functions()[idx] : nullptr;
  }

  std::optional<Rational> number(const SExpr& e) {
    if (e.is_atom) return parse_rational(e.atom);
    if (e.head() == "/" && e.items.size() == 3) {
      auto a = number(e.items[1]), b = number(e.items[2]);
      if (a && b && *b != 0) return Rational(*a / *b);
    }
    if (e.head() == "-" && e.items.size() == 2)
      if (auto a = number(e.items[1])) return Rational(-*a);
    return std::nullopt;
  }

  Term term(const SExpr& e, SortId sort) {
    if (auto r = number(e)) return Term::number(*r, sort);
    if (e.is_atom) {
      if (auto it = vars_.find(e.atom); it != vars_.end()) return it->second;
      if (auto f = function(e.atom)) return Term::apply(f->name, {}, f->result);
      throw UnsupportedError("unexpected symbol in solver output: " + e.atom);
    }
    const std::string h = e.head();
    if (h == "to_real" && e.items.size() == 2) return term(e.items[1], sort);
    std::vector<Term> args;
    if (h == "+" || h == "-" || h == "*") {
      for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i], sort));
      return Term::apply(h, std::move(args), sort);
    }
    if (const auto* f = function(h)) {
      for (std::size_t i = 0; i < f->args.size(); ++i) args.push_back(term(e.items.at(i + 1), f->args[i]));
      return Term::apply(f->name, std::move(args), f->result);
    }
    throw UnsupportedError("unexpected operator in solver output: " + h);
  }

  Atom atom(const SExpr& e) {
    if (e.is_atom) return predicate(e.atom, {});
    const std::string h = e.head();
    if (h == "=" || h == "distinct" || h == "<" || h == "<=" || h == ">" || h == ">=") {
      if (e.items.size() != 3) throw UnsupportedError("unexpected arity in solver output: " + e.to_string());
      auto s = infer(e.items[1]);
      if (!s) s = infer(e.items[2]);
      if (!s) s = sig_.first_sort_of(SortKind::rational);
      if (!s) throw UnsupportedError("cannot type solver output: " + e.to_string());
      Term a = term(e.items[1], *s), b = term(e.items[2], *s);
      if (h == "=" || h == "distinct") return Atom::equal(a, b);
      if (h == "<") return Atom::less(a, b);
      if (h == "<=") return Atom::less_equal(a, b);
      if (h == ">") return Atom::less(b, a);
      return Atom::less_equal(b, a);
    }
    std::vector<SExpr> rest(e.items.begin() + 1, e.items.end());
    return predicate(h, rest);
  }

  Atom predicate(const std::string& name, const std::vector<SExpr>& args) {
    if (name.size() < 2 || name[0] != 'p') throw UnsupportedError("unexpected atom in solver output: " + name);
    auto idx = std::strtoul(name.c_str() + 1, nullptr, 10);
    if (idx >= sig_.predicates().size()) throw UnsupportedError("unexpected predicate in solver output: " + name);
    const auto& p = sig_.predicates()[idx];
    std::vector<Term> ts;
    for (std::size_t i = 0; i < p.args.size(); ++i) ts.push_back(term(args.at(i), p.args[i]));
    return Atom::predicate(p.name, std::move(ts));
  }

  const Signature& sig_;
  const std::map<std::string, Term>& vars_;
};

} // namespace

Formula SmtEncoder::decode(const std::string& text) {
  auto exprs = parse_sexprs(text);
  Decoder d(sig_, vars_by_name_);
  std::vector<Formula> goals;
  for (const auto& top : exprs) {
    if (top.head() == "error") throw Error("solver error: " + top.to_string());
    const SExpr* list = &top;
    std::vector<SExpr> goal_list;
    if (top.head() == "goals") {
      goal_list.assign(top.items.begin() + 1, top.items.end());
    } else {
      goal_list.push_back(*list);
    }
    for (const auto& g : goal_list) {
      std::vector<Formula> parts;
      if (g.head() == "goal") {
        for (std::size_t i = 1; i < g.items.size(); ++i) {
          if (g.items[i].is_atom && !g.items[i].atom.empty() && g.items[i].atom[0] == ':') {
            ++i;
            continue;
          }
          parts.push_back(d.formula(d.expand(g.items[i], {}), true));
        }
      } else {
        parts.push_back(d.formula(d.expand(g, {}), true));
      }
      goals.push_back(Formula::conj(std::move(parts)));
    }
  }
  return Formula::disj(std::move(goals));
}

// ---------------------------------------------------------------- backend

namespace {

class ExternalTheory : public Theory {
public:
  ExternalTheory(const Signature& sig, TheoryConfig cfg) : Theory(sig, std::move(cfg)), proc_(cfg_.solver_command) {}

  void check_supported(const Formula&) const override {}

  bool is_satisfiable(const Formula& f) override {
    ++calls_;
    if (f.is_top()) return true;
    if (f.is_bottom()) return false;
    SmtEncoder enc(*sig_);
    std::string q = preamble() + enc.declarations({}, f) + "(assert " + enc.formula(f) + ")\n(check-sat)\n";
    proc_.send(q);
    auto r = proc_.read_response(wall_ms());
    if (r == "sat") return true;
    if (r == "unsat") return false;
    if (r == "unknown" || r == "timeout") throw ResourceError("external solver returned " + r);
    throw Error("unexpected solver reply: " + r);
  }

  Formula qe_cover(const std::vector<Term>& ys, const Formula& f) override {
    ++calls_;
    if (ys.empty()) return f;
    SmtEncoder enc(*sig_);
    std::string decl = enc.declarations(ys, f);
    std::string binder = "(";
    for (const auto& y : ys) binder += "(" + enc.term(y) + " " + enc.sort(y.sort()) + ")";
    binder += ")";
    // Bound variables shadow the declared constants of the same name.
    std::string q = preamble() + decl + "(assert (exists " + binder + " " + enc.formula(f) + "))\n(apply qe)\n";
    proc_.send(q);
    auto r = proc_.read_response(wall_ms());
    if (r.find("exists") != std::string::npos || r.find("forall") != std::string::npos)
      throw UnsupportedError("external solver could not eliminate quantifiers");
    return enc.decode(r);
  }

private:
  std::string preamble() const {
    std::string p = "(reset)\n(set-logic ALL)\n";
    if (cfg_.solver_timeout_ms > 0 && cfg_.solver_command.find("z3") != std::string::npos)
      p += "(set-option :timeout " + std::to_string(cfg_.solver_timeout_ms) + ")\n";
    return p;
  }

  int wall_ms() const { return cfg_.solver_timeout_ms > 0 ? cfg_.solver_timeout_ms + 2000 : 0; }

  SmtProcess proc_;
};

} // namespace

std::unique_ptr<Theory> make_external_theory(const Signature& sig, const TheoryConfig& cfg) {
  auto c = cfg;
  if (c.solver_command.empty()) {
    const char* env = std::getenv("DATAMON_SOLVER");
    c.solver_command = env ? env : "z3 -in";
  }
  return std::make_unique<ExternalTheory>(sig, c);
}

} // namespace datamon
