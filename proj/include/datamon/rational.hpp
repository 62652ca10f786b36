#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace datamon {

/// Exact rational numbers. Ordering decisions in the order backends must be exact.
using Rational = boost::multiprecision::cpp_rational;

/// Accepts "12", "-3", "3/4", "-1.25". Returns nullopt on anything else.
std::optional<Rational> parse_rational(std::string_view text);

/// Prints integers plainly and fractions as "n/d".
std::string to_string(const Rational& r);

} // namespace datamon
