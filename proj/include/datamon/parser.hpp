#pragma once

#include "datamon/property.hpp"
#include "datamon/sexpr.hpp"
#include "datamon/signature.hpp"

#include <string_view>

namespace datamon {

/// Signature file grammar:
///   (sort NAME [:rational | :integer])
///   (fun NAME (ARGSORT...) RESULTSORT)
///   (const NAME SORT)
///   (pred NAME (ARGSORT...))
///   (var NAME SORT)
Signature parse_signature(std::string_view text);

/// Property file: any number of (define NAME EXPR) followed by one property
/// expression. Negation and implication are pushed to atoms while parsing.
Property parse_property(std::string_view text, const Signature& sig);

/// A single quantifier-free formula (no temporal operators).
Formula parse_formula(std::string_view text, const Signature& sig);

Term parse_term(const SExpr& e, const Signature& sig, std::optional<SortId> expected = std::nullopt);
Property parse_property_expr(const SExpr& e, const Signature& sig);

} // namespace datamon
