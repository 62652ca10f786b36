#include "datamon/trace_io.hpp"

#include "datamon/errors.hpp"

#include <json.hpp>

namespace datamon {

using json = nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 1, static_cast<int>(e.byte));
  }
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) return v.dump();
  throw TypeError("expected an element name or a number, found " + v.dump());
}

Value read_value(const FactBase& facts, SortId sort, const json& v) { return facts.value_of(sort, scalar_text(v)); }

Assignment read_assignment(const json& obj, const FactBase& facts) {
  const auto& sig = facts.signature();
  if (!obj.is_object()) throw TypeError("assignment must be a JSON object");
  Assignment a;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const auto* v = sig.find_variable(it.key());
    if (!v) throw TypeError("unknown variable in assignment: " + it.key());
    a.emplace(v->name, read_value(facts, v->sort, it.value()));
  }
  for (const auto& v : sig.variables())
    if (!a.count(v.name)) throw TypeError("assignment misses variable " + v.name);
  return a;
}

FactBase read_facts(const json& doc, const Signature& sig) {
  FactBase facts(sig);
  if (doc.contains("sorts"))
    for (const auto& s : doc["sorts"])
      if (!sig.find_sort(s.get<std::string>())) throw TypeError("trace mentions unknown sort " + s.get<std::string>());
  if (doc.contains("elements")) {
    for (auto it = doc["elements"].begin(); it != doc["elements"].end(); ++it) {
      auto sort = sig.find_sort(it.key());
      if (!sort) throw TypeError("elements declared for unknown sort " + it.key());
      for (const auto& e : it.value()) facts.add_element(*sort, e.get<std::string>());
    }
  }
  if (doc.contains("closed_predicates"))
    for (const auto& p : doc["closed_predicates"]) {
      auto name = p.get<std::string>();
      if (!sig.find_predicate(name)) throw TypeError("unknown closed predicate " + name);
      facts.close_predicate(name);
    }
  if (doc.contains("facts")) {
    std::size_t index = 0;
    for (const auto& f : doc["facts"]) {
      try {
        if (!f.is_array() || f.empty() || !f[0].is_string()) throw TypeError("fact must be a non-empty array");
        std::size_t pos = 0;
        bool positive = true;
        if (f[0] == "not") {
          positive = false;
          pos = 1;
        }
        const auto name = f.at(pos).get<std::string>();
        if (const auto* fn = sig.find_function(name)) {
          if (!positive) throw TypeError("negated function fact");
          if (f.size() != pos + fn->args.size() + 2) throw TypeError("wrong arity in fact for " + name);
          std::vector<Value> args;
          for (std::size_t i = 0; i < fn->args.size(); ++i) args.push_back(read_value(facts, fn->args[i], f[pos + 1 + i]));
          facts.set_function(name, std::move(args), read_value(facts, fn->result, f.back()));
        } else if (const auto* p = sig.find_predicate(name)) {
          if (f.size() != pos + p->args.size() + 1) throw TypeError("wrong arity in fact for " + name);
          std::vector<Value> args;
          for (std::size_t i = 0; i < p->args.size(); ++i) args.push_back(read_value(facts, p->args[i], f[pos + 1 + i]));
          facts.set_predicate(name, std::move(args), positive);
        } else {
          throw TypeError("unknown symbol in fact: " + name);
        }
      } catch (const TypeError& e) {
        throw TypeError("fact #" + std::to_string(index) + " " + f.dump() + ": " + e.what());
      } catch (const json::exception& e) {
        throw TypeError("fact #" + std::to_string(index) + " " + f.dump() + ": " + e.what());
      }
      ++index;
    }
  }
  return facts;
}

json value_json(const Value& v) {
  if (v.number && boost::multiprecision::denominator(*v.number) == 1)
    return json::parse(boost::multiprecision::numerator(*v.number).str());
  return v.name;
}

} // namespace

FactBase parse_facts_json(const std::string& text, const Signature& sig) { return read_facts(parse_json(text), sig); }

Trace parse_trace_json(const std::string& text, const Signature& sig) {
  auto doc = parse_json(text);
  Trace tr{read_facts(doc, sig), {}};
  if (!doc.contains("trace") || !doc["trace"].is_array() || doc["trace"].empty())
    throw TypeError("trace document needs a non-empty \"trace\" array");
  std::size_t i = 0;
  for (const auto& step : doc["trace"]) {
    try {
      tr.steps.push_back(read_assignment(step, tr.facts));
    } catch (const TypeError& e) {
      throw TypeError("instant " + std::to_string(i) + ": " + e.what());
    }
    ++i;
  }
  return tr;
}

Assignment parse_assignment_json(const std::string& text, const FactBase& facts) {
  return read_assignment(parse_json(text), facts);
}

std::string assignment_to_json(const Assignment& a) {
  json obj = json::object();
  for (const auto& [k, v] : a) obj[k] = value_json(v);
  return obj.dump();
}

std::string trace_to_json(const Trace& tr) {
  const auto& sig = tr.facts.signature();
  json doc;
  doc["sorts"] = json::array();
  for (const auto& s : sig.sorts()) doc["sorts"].push_back(s.name);
  doc["elements"] = json::object();
  for (std::size_t i = 0; i < sig.sorts().size(); ++i) {
    const auto& els = tr.facts.elements(static_cast<SortId>(i));
    if (!els.empty()) doc["elements"][sig.sorts()[i].name] = els;
  }
  doc["facts"] = json::array();
  for (const auto& [fn, table] : tr.facts.function_facts())
    for (const auto& [args, v] : table) {
      json f = json::array({fn});
      for (const auto& a : args) f.push_back(value_json(a));
      f.push_back(value_json(v));
      doc["facts"].push_back(f);
    }
  for (const auto& [p, table] : tr.facts.predicate_facts())
    for (const auto& [args, holds] : table) {
      json f = holds ? json::array({p}) : json::array({"not", p});
      for (const auto& a : args) f.push_back(value_json(a));
      doc["facts"].push_back(f);
    }
  doc["closed_predicates"] = std::vector<std::string>(tr.facts.closed_predicates().begin(), tr.facts.closed_predicates().end());
  doc["trace"] = json::array();
  for (const auto& a : tr.steps) doc["trace"].push_back(json::parse(assignment_to_json(a)));
  return doc.dump(1);
}

} // namespace datamon
