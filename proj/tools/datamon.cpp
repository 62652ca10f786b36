#include "datamon/cache.hpp"
#include "datamon/coreach.hpp"
#include "datamon/errors.hpp"
#include "datamon/monitor.hpp"
#include "datamon/parser.hpp"
#include "datamon/trace_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace datamon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { usage_error = 64, input_error = 65, unsupported = 66, resource = 67, missing_facts = 68, monitor_failure = 69, internal = 70 };

struct Options {
  std::string signature, property, trace, facts, cache_dir, dot_dir, backend = "tame", format = "plain";
  std::vector<std::string> corpus;
  bool per_prefix = false, stream = false, entailment = false;
  std::size_t budget_states = 10000, budget_nodes = 5000;
  int budget_solver_ms = 60000;
  int lookback_k = 1, lookback_len = 5;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TheoryConfig theory_config(const Options& o) {
  TheoryConfig cfg;
  auto colon = o.backend.find(':');
  cfg.backend = parse_backend(o.backend.substr(0, colon));
  if (colon != std::string::npos) {
    if (cfg.backend != BackendKind::external) throw Error("only the external backend takes a command");
    cfg.solver_command = o.backend.substr(colon + 1);
  }
  cfg.solver_timeout_ms = o.budget_solver_ms;
  return cfg;
}

CompileOptions compile_options(const Options& o) {
  CompileOptions c;
  c.nfa.max_states = o.budget_states;
  c.cg.max_nodes = o.budget_nodes;
  return c;
}

double since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

/// Compiled artifacts, from the cache when possible.
Artifacts artifacts(const Options& o, const Signature& sig, const Property& p, Theory& th, bool* from_cache = nullptr) {
  std::string digest = artifact_digest(p, sig, th.config());
  if (!o.cache_dir.empty())
    if (auto hit = load_cached(o.cache_dir, sig, digest)) {
      if (from_cache) *from_cache = true;
      return std::move(*hit);
    }
  if (from_cache) *from_cache = false;
  Artifacts art = compile(p, th, compile_options(o));
  if (!o.cache_dir.empty()) store_cached(o.cache_dir, art, digest);
  return art;
}

int core_states(const Nfa& a) {
  int n = 0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    const auto& p = a.property(static_cast<int>(q));
    if (!p || (!p->is_top() && !p->is_bottom())) ++n;
  }
  return n;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

int cmd_compile(const Options& o) {
  auto sig = parse_signature(read_file(o.signature));
  auto p = parse_property(read_file(o.property), sig);
  auto th = make_theory(sig, theory_config(o));
  bool cached = false;
  auto art = artifacts(o, sig, p, *th, &cached);
  if (!o.dot_dir.empty()) {
    fs::create_directories(o.dot_dir);
    write_file(fs::path(o.dot_dir) / "nfa.dot", nfa_to_dot(art.nfa));
    write_file(fs::path(o.dot_dir) / "cg_positive.dot", cg_to_dot(art.positive, art.nfa));
    write_file(fs::path(o.dot_dir) / "cg_negative.dot", cg_to_dot(art.negative, art.nfa));
  }
  json s{{"property", p.key()},
         {"size", p.size()},
         {"states", art.nfa.size()},
         {"core_states", core_states(art.nfa)},
         {"transitions", art.nfa.transitions().size()},
         {"cg_positive", art.positive.nodes.size()},
         {"cg_negative", art.negative.nodes.size()},
         {"complete", art.complete()},
         {"cached", cached},
         {"t_pre", art.seconds},
         {"digest", artifact_digest(p, sig, th->config())}};
  if (!art.complete()) {
    s["diagnosis"] = art.positive.complete ? art.negative.diagnosis : art.positive.diagnosis;
    s["growth"] = art.positive.complete ? art.negative.growth : art.positive.growth;
  }
  if (o.format == "json-lines") {
    std::cout << s.dump() << "\n";
  } else {
    std::cout << "states " << art.nfa.size() << " (core " << core_states(art.nfa) << "), transitions "
              << art.nfa.transitions().size() << "\n"
              << "coreachability nodes " << art.positive.nodes.size() << " positive, " << art.negative.nodes.size()
              << " negative\n"
              << "t_pre " << std::fixed << std::setprecision(3) << art.seconds << " s" << (cached ? " (cached)" : "")
              << "\n";
    if (!art.complete()) {
      std::cout << "incomplete: " << s["diagnosis"].get<std::string>() << "\n";
      for (const auto& f : s["growth"]) std::cout << "  " << f.get<std::string>() << "\n";
    }
  }
  return art.complete() ? 0 : 2;
}

int cmd_analyze(const Options& o) {
  auto sig = parse_signature(read_file(o.signature));
  auto p = parse_property(read_file(o.property), sig);
  auto cycle = find_sort_cycle(sig);
  bool tame = check_tame(sig);
  bool mc = true, arithmetic = false;
  for (const auto& l : collect_constraints(p)) {
    mc = mc && is_monotonicity_constraint(l);
    arithmetic = arithmetic || l.atom().is_order();
    for (const auto& t : l.atom().args()) arithmetic = arithmetic || sig.is_arithmetic(t.sort());
  }
  auto a = build_nfa(p, NfaOptions{{Pruning::syntactic, nullptr}, o.budget_states});
  bool safe = check_safe_lookback(a);
  json lb;
  try {
    auto r = bounded_lookback_check(a, o.lookback_k, o.lookback_len);
    lb = {{"k", o.lookback_k}, {"length", o.lookback_len}, {"holds", r.holds}, {"words", r.words}, {"longest", r.longest}};
    if (!r.holds) {
      json w = json::array();
      for (int t : r.witness) {
        std::string label;
        for (const auto& l : a.transitions()[t].label.literals) label += (label.empty() ? "" : " ") + l.key();
        w.push_back(label);
      }
      lb["witness"] = w;
    }
  } catch (const ResourceError& e) {
    lb = {{"k", o.lookback_k}, {"length", o.lookback_len}, {"error", e.what()}};
  }
  std::string verdict = "best-effort";
  if (cycle.empty() && !arithmetic) verdict = "guaranteed (acyclic signature)";
  else if (tame && mc) verdict = "guaranteed (tame signature, monotonicity constraints)";
  else if (lb.value("holds", false)) verdict = "best-effort (bounded lookback up to the checked length)";
  json r{{"acyclic", cycle.empty()}, {"tame", tame},       {"monotonicity_constraints", mc},
         {"safe_lookback", safe},    {"lookback", lb},     {"termination", verdict}};
  if (!cycle.empty()) r["sort_cycle"] = cycle;
  if (o.format == "json-lines") {
    std::cout << r.dump() << "\n";
  } else {
    std::cout << "acyclic " << (cycle.empty() ? "yes" : "no (" + cycle + ")") << "\n"
              << "tame " << (tame ? "yes" : "no") << "\n"
              << "monotonicity constraints " << (mc ? "yes" : "no") << "\n"
              << "safe lookback " << (safe ? "yes" : "no") << "\n";
    if (lb.contains("error"))
      std::cout << "bounded lookback (K=" << o.lookback_k << ") " << lb["error"].get<std::string>() << "\n";
    else
      std::cout << "bounded lookback (K=" << o.lookback_k << ", words up to " << o.lookback_len << ") "
                << (lb["holds"].get<bool>() ? "holds" : "violated") << "\n";
    std::cout << "termination " << verdict << "\n";
  }
  return 0;
}

void print_verdict(const Options& o, const Verdict& v) {
  if (o.format == "json-lines") {
    json j{{"instant", v.instant}, {"verdict", to_string(v.kind)}, {"state", v.state}};
    if (!v.detail.empty()) j["detail"] = v.detail;
    std::cout << j.dump() << std::endl;
  } else if (o.per_prefix || o.stream) {
    std::cout << v.instant << " " << to_string(v.kind) << (v.detail.empty() ? "" : "  # " + v.detail) << std::endl;
  } else {
    std::cout << to_string(v.kind) << (v.detail.empty() ? "" : "  # " + v.detail) << std::endl;
  }
}

int cmd_monitor(const Options& o) {
  auto sig = parse_signature(read_file(o.signature));
  auto p = parse_property(read_file(o.property), sig);
  auto th = make_theory(sig, theory_config(o));
  auto art = artifacts(o, sig, p, *th);
  MonitorOptions mo;
  mo.entailment = o.entailment;
  mo.entailment_theory = theory_config(o);
  if (o.stream) {
    if (o.facts.empty()) throw Error("--stream needs --facts");
    auto facts = parse_facts_json(read_file(o.facts), sig);
    MonitorSession session(art, facts, mo);
    std::string line;
    std::optional<Verdict> last;
    for (int n = 1; std::getline(std::cin, line); ++n) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      Assignment a;
      try {
        a = parse_assignment_json(line, facts);
      } catch (const std::exception& e) {
        std::cerr << "line " << n << ": " << e.what() << "\n";
        return input_error;
      }
      last = session.step(a);
      print_verdict(o, *last);
    }
    if (!last) throw Error("no events on the input stream");
    return exit_code(last->kind);
  }
  if (o.trace.empty()) throw Error("monitor needs --trace or --stream");
  auto tr = parse_trace_json(read_file(o.trace), sig);
  auto verdicts = monitor_prefixes(art, tr, mo);
  if (o.per_prefix || o.format == "json-lines")
    for (const auto& v : verdicts) print_verdict(o, v);
  else
    print_verdict(o, verdicts.back());
  return exit_code(verdicts.back().kind);
}

int cmd_bench(const Options& o) {
  json rows = json::array();
  std::vector<fs::path> domains;
  for (const auto& c : o.corpus) {
    if (!fs::is_directory(c)) throw Error("not a directory: " + c);
    std::vector<fs::path> dirs{c};
    for (const auto& e : fs::directory_iterator(c))
      if (e.is_directory()) dirs.push_back(e.path());
    for (const auto& d : dirs) {
      for (const auto& e : fs::directory_iterator(d))
        if (e.path().extension() == ".sig") {
          domains.push_back(d);
          break;
        }
    }
  }
  std::sort(domains.begin(), domains.end());
  for (const auto& d : domains) {
    std::vector<fs::path> sigs, props, traces;
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.path().extension() == ".sig") sigs.push_back(e.path());
      if (e.path().extension() == ".prop") props.push_back(e.path());
    }
    if (fs::is_directory(d / "traces"))
      for (const auto& e : fs::directory_iterator(d / "traces"))
        if (e.path().extension() == ".json") traces.push_back(e.path());
    std::sort(props.begin(), props.end());
    std::sort(traces.begin(), traces.end());
    for (const auto& pf : props) {
      json row{{"domain", d.filename().string()}, {"property", pf.stem().string()}};
      try {
        if (sigs.size() != 1) throw Error("expected exactly one signature file");
        auto sig = parse_signature(read_file(sigs[0].string()));
        auto p = parse_property(read_file(pf.string()), sig);
        auto th = make_theory(sig, theory_config(o));
        auto start = std::chrono::steady_clock::now();
        auto art = compile(p, *th, compile_options(o));
        double t_pre = since(start);
        auto mon = std::chrono::steady_clock::now();
        json verdicts = json::array();
        for (const auto& tf : traces) {
          try {
            verdicts.push_back(to_string(monitor(art, parse_trace_json(read_file(tf.string()), sig)).kind));
          } catch (const std::exception& e) {
            verdicts.push_back(std::string("error: ") + e.what());
          }
        }
        double t_mon = since(mon);
        row.update({{"size", p.size()}, {"t", t_pre + t_mon}, {"t_pre", t_pre}, {"t_mon", t_mon},
                    {"states", art.nfa.size()}, {"complete", art.complete()}, {"verdicts", verdicts}});
      } catch (const std::exception& e) {
        row["error"] = e.what();
      }
      rows.push_back(row);
    }
  }
  if (o.format == "json-lines") {
    for (const auto& r : rows) std::cout << r.dump() << "\n";
    return 0;
  }
  std::cout << std::left << std::setw(10) << "domain" << std::setw(16) << "property" << std::right << std::setw(6)
            << "|p|" << std::setw(9) << "t" << std::setw(9) << "t_pre" << std::setw(9) << "t_mon"
            << "  verdicts\n";
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(10) << r["domain"].get<std::string>() << std::setw(16)
              << r["property"].get<std::string>() << std::right;
    if (r.contains("error")) {
      std::cout << "  error: " << r["error"].get<std::string>() << "\n";
      continue;
    }
    std::cout << std::setw(6) << r["size"].get<std::size_t>() << std::fixed << std::setprecision(2) << std::setw(9)
              << r["t"].get<double>() << std::setw(9) << r["t_pre"].get<double>() << std::setw(9)
              << r["t_mon"].get<double>() << " ";
    for (const auto& v : r["verdicts"]) std::cout << " " << v.get<std::string>();
    std::cout << (r["complete"].get<bool>() ? "" : "  (incomplete)") << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anticipatory monitor for first-order temporal properties over finite traces"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_property) {
    sub->add_option("--signature", o.signature, "signature file")->required()->check(CLI::ExistingFile);
    auto* prop = sub->add_option("--property", o.property, "property file")->check(CLI::ExistingFile);
    if (needs_property) prop->required();
    sub->add_option("--backend", o.backend, "euf | mc | tame | external[:CMD]");
    sub->add_option("--budget-states", o.budget_states, "automaton state cap")->check(CLI::PositiveNumber);
    sub->add_option("--budget-nodes", o.budget_nodes, "coreachability node cap")->check(CLI::PositiveNumber);
    sub->add_option("--budget-solver-ms", o.budget_solver_ms, "time budget per solver call")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"plain", "json-lines"}));
  };

  auto* compile_cmd = app.add_subcommand("compile", "build the automaton and coreachability graphs");
  common(compile_cmd, true);
  compile_cmd->add_option("--cache-dir", o.cache_dir, "artifact cache directory");
  compile_cmd->add_option("--dot-dir", o.dot_dir, "write DOT renderings here");

  auto* analyze_cmd = app.add_subcommand("analyze", "report decidability criteria");
  common(analyze_cmd, true);
  analyze_cmd->add_option("--lookback-k", o.lookback_k, "lookback bound")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--lookback-len", o.lookback_len, "word length checked")->check(CLI::NonNegativeNumber);

  auto* monitor_cmd = app.add_subcommand("monitor", "monitor a trace");
  common(monitor_cmd, true);
  monitor_cmd->add_option("--trace", o.trace, "trace file")->check(CLI::ExistingFile);
  monitor_cmd->add_option("--facts", o.facts, "fact base for --stream")->check(CLI::ExistingFile);
  monitor_cmd->add_option("--cache-dir", o.cache_dir, "artifact cache directory");
  monitor_cmd->add_flag("--per-prefix", o.per_prefix, "one verdict per prefix");
  monitor_cmd->add_flag("--stream", o.stream, "read one assignment per stdin line");
  monitor_cmd->add_flag("--entailment", o.entailment, "decide missing facts by entailment");

  auto* bench_cmd = app.add_subcommand("bench", "time compilation and monitoring over corpora");
  bench_cmd->add_option("--corpus", o.corpus, "corpus directories")->required();
  bench_cmd->add_option("--backend", o.backend, "euf | mc | tame | external[:CMD]");
  bench_cmd->add_option("--budget-states", o.budget_states, "automaton state cap");
  bench_cmd->add_option("--budget-nodes", o.budget_nodes, "coreachability node cap");
  bench_cmd->add_option("--budget-solver-ms", o.budget_solver_ms, "time budget per solver call");
  bench_cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"plain", "json-lines"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : usage_error;
  }

  try {
    if (*compile_cmd) return cmd_compile(o);
    if (*analyze_cmd) return cmd_analyze(o);
    if (*monitor_cmd) return cmd_monitor(o);
    return cmd_bench(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return input_error;
  } catch (const TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return input_error;
  } catch (const UnsupportedError& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return unsupported;
  } catch (const ResourceError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return resource;
  } catch (const InsufficientFacts& e) {
    std::cerr << "insufficient facts: " << e.what() << "\n";
    return missing_facts;
  } catch (const MonitorError& e) {
    std::cerr << "monitor error: " << e.what() << "\n";
    return monitor_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return internal;
  }
}
