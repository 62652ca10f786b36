#pragma once

#include "datamon/trace.hpp"

#include <string>

namespace datamon {

/// Trace document:
///   {"sorts": [...], "elements": {"Ticket": ["t1", ...]},
///    "facts": [["price", "t2", 100], ["P", "e1"], ["not", "P", "e2"]],
///    "closed_predicates": ["P"], "trace": [{"t": "t2", "b": "t2"}, ...]}
/// Function facts list the arguments followed by the value; constants are
/// ["name", value]. Numbers may be JSON numbers or strings such as "3/4".
Trace parse_trace_json(const std::string& text, const Signature& sig);

/// Reads everything but "trace"; the "trace" field may be absent.
FactBase parse_facts_json(const std::string& text, const Signature& sig);

/// One assignment object, e.g. {"t": "t2", "b": "t2"}; must be total over V.
Assignment parse_assignment_json(const std::string& text, const FactBase& facts);

std::string assignment_to_json(const Assignment& a);
std::string trace_to_json(const Trace& tr);

} // namespace datamon
