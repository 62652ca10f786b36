#include "datamon/rational.hpp"

#include <cctype>

namespace datamon {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

} // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  Rational r;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash), den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    boost::multiprecision::cpp_int d{std::string(den)};
    if (d == 0) return std::nullopt;
    r = Rational(boost::multiprecision::cpp_int(std::string(num)), d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot), frac = text.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) return std::nullopt;
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    boost::multiprecision::cpp_int w = whole.empty() ? 0 : boost::multiprecision::cpp_int(std::string(whole));
    r = Rational(w * scale + boost::multiprecision::cpp_int(std::string(frac)), scale);
  } else {
    if (!all_digits(text)) return std::nullopt;
    r = Rational(boost::multiprecision::cpp_int(std::string(text)));
  }
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

} // namespace datamon
