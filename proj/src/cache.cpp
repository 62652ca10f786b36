#include "datamon/cache.hpp"

#include "datamon/errors.hpp"
#include "datamon/parser.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace datamon {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json graph_to_json(const CoreachGraph& g) {
  json nodes = json::array(), edges = json::array();
  for (const auto& n : g.nodes) nodes.push_back({{"state", n.state}, {"formula", n.formula.key()}});
  for (const auto& e : g.edges) edges.push_back({e.from, e.to, e.transition});
  return {{"polarity", to_string(g.polarity)}, {"complete", g.complete}, {"diagnosis", g.diagnosis},
          {"growth", g.growth}, {"nodes", nodes}, {"edges", edges}};
}

CoreachGraph graph_from_json(const json& j, const Signature& sig, std::size_t states) {
  CoreachGraph g;
  g.polarity = j.at("polarity") == "positive" ? Polarity::positive : Polarity::negative;
  g.complete = j.at("complete");
  g.diagnosis = j.at("diagnosis");
  g.growth = j.at("growth").get<std::vector<std::string>>();
  g.by_state.assign(states, {});
  for (const auto& n : j.at("nodes")) {
    int q = n.at("state");
    g.by_state.at(static_cast<std::size_t>(q)).push_back(static_cast<int>(g.nodes.size()));
    g.nodes.push_back({q, parse_formula(n.at("formula").get<std::string>(), sig)});
  }
  for (const auto& e : j.at("edges")) g.edges.push_back({e[0], e[1], e[2]});
  return g;
}

} // namespace

std::string artifact_digest(const Property& p, const Signature& sig, const TheoryConfig& cfg) {
  std::string backend = to_string(cfg.backend);
  if (cfg.backend == BackendKind::external) backend += ":" + cfg.solver_command;
  auto h = fnv1a(p.key());
  h = fnv1a("\n" + sig.to_text(), h);
  h = fnv1a("\n" + backend + "\nv" + std::to_string(cache_format_version), h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string artifacts_to_json(const Artifacts& art, const std::string& digest) {
  json j;
  j["version"] = cache_format_version;
  j["digest"] = digest;
  j["property"] = art.property.key();
  j["seconds"] = art.seconds;
  j["nfa"] = json::parse(nfa_to_json(art.nfa));
  j["positive"] = graph_to_json(art.positive);
  j["negative"] = graph_to_json(art.negative);
  return j.dump(1);
}

Artifacts artifacts_from_json(const std::string& text, const Signature& sig, const std::string& digest) {
  json j = json::parse(text);
  if (j.at("version") != cache_format_version) throw Error("cache format version mismatch");
  if (j.at("digest") != digest) throw Error("cache digest mismatch");
  Artifacts art;
  art.property = parse_property(j.at("property").get<std::string>(), sig);
  art.seconds = j.at("seconds");
  art.nfa = nfa_from_json(j.at("nfa").dump(), sig);
  art.positive = graph_from_json(j.at("positive"), sig, art.nfa.size());
  art.negative = graph_from_json(j.at("negative"), sig, art.nfa.size());
  compute_ext(art);
  return art;
}

std::optional<Artifacts> load_cached(const std::string& dir, const Signature& sig, const std::string& digest) {
  auto path = std::filesystem::path(dir) / (digest + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return artifacts_from_json(ss.str(), sig, digest);
}

void store_cached(const std::string& dir, const Artifacts& art, const std::string& digest) {
  std::filesystem::create_directories(dir);
  auto path = std::filesystem::path(dir) / (digest + ".json");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << artifacts_to_json(art, digest);
  }
  std::filesystem::rename(tmp, path);
}

} // namespace datamon
