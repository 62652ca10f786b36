#include "datamon/errors.hpp"
#include "datamon/theory.hpp"

namespace datamon {

namespace {

struct Cell {
  bool is_function;
  std::string name;
  std::vector<Value> args;
  const std::vector<Value>* domain;
};

void tuples(const std::vector<SortId>& sorts, const std::map<SortId, std::vector<Value>>& carrier,
            std::vector<Value>& cur, std::vector<std::vector<Value>>& out) {
  if (cur.size() == sorts.size()) {
    out.push_back(cur);
    return;
  }
  for (const auto& v : carrier.at(sorts[cur.size()])) {
    cur.push_back(v);
    tuples(sorts, carrier, cur, out);
    cur.pop_back();
  }
}

} // namespace

std::size_t enumerate_small_models(const Signature& sig, const std::map<SortId, int>& sizes,
                                   const std::function<bool(const FiniteModel&)>& fn, std::size_t max_models) {
  std::map<SortId, std::vector<Value>> carrier;
  for (std::size_t i = 0; i < sig.sorts().size(); ++i) {
    SortId s = static_cast<SortId>(i);
    auto it = sizes.find(s);
    int n = it == sizes.end() ? 1 : it->second;
    if (n < 1) throw Error("carrier sizes must be positive");
    auto& c = carrier[s];
    for (int k = 0; k < n; ++k)
      c.push_back(sig.is_arithmetic(s) ? Value::numeric(s, k) : Value::element(s, sig.sort_name(s) + "!" + std::to_string(k)));
  }
  std::vector<Cell> cells;
  for (const auto& f : sig.functions()) {
    std::vector<std::vector<Value>> ts;
    std::vector<Value> cur;
    tuples(f.args, carrier, cur, ts);
    for (auto& t : ts) cells.push_back({true, f.name, std::move(t), &carrier.at(f.result)});
  }
  for (const auto& p : sig.predicates()) {
    std::vector<std::vector<Value>> ts;
    std::vector<Value> cur;
    tuples(p.args, carrier, cur, ts);
    for (auto& t : ts) cells.push_back({false, p.name, std::move(t), nullptr});
  }
  long double total = 1;
  for (const auto& c : cells) total *= c.is_function ? static_cast<long double>(c.domain->size()) : 2.0L;
  if (total > static_cast<long double>(max_models)) throw ResourceError("model enumeration budget exceeded");

  std::vector<std::size_t> digit(cells.size(), 0);
  std::size_t produced = 0;
  while (true) {
    FiniteModel m{FactBase(sig), carrier};
    for (const auto& [s, vals] : carrier)
      if (!sig.is_arithmetic(s))
        for (const auto& v : vals) m.facts.add_element(s, v.name);
    for (const auto& p : sig.predicates()) m.facts.close_predicate(p.name);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      if (c.is_function) m.facts.set_function(c.name, c.args, (*c.domain)[digit[i]]);
      else if (digit[i]) m.facts.set_predicate(c.name, c.args, true);
    }
    ++produced;
    if (!fn(m)) return produced;
    std::size_t i = 0;
    for (; i < cells.size(); ++i) {
      std::size_t base = cells[i].is_function ? cells[i].domain->size() : 2;
      if (++digit[i] < base) break;
      digit[i] = 0;
    }
    if (i == cells.size()) return produced;
  }
}

std::size_t enumerate_models_up_to(const Signature& sig, int size_bound, const std::function<bool(const FiniteModel&)>& fn,
                                   std::size_t max_models) {
  const std::size_t n = sig.sorts().size();
  std::vector<int> size(n, 1);
  std::size_t produced = 0;
  bool stop = false;
  while (!stop) {
    std::map<SortId, int> sizes;
    for (std::size_t i = 0; i < n; ++i) sizes[static_cast<SortId>(i)] = size[i];
    produced += enumerate_small_models(
        sig, sizes,
        [&](const FiniteModel& m) {
          if (!fn(m)) stop = true;
          return !stop;
        },
        max_models);
    std::size_t i = 0;
    for (; i < n; ++i) {
      if (++size[i] <= size_bound) break;
      size[i] = 1;
    }
    if (i == n) break;
  }
  return produced;
}

} // namespace datamon
