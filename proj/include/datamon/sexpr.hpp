#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace datamon {

/// S-expression with source position, the concrete syntax of signature and
/// property files. ';' starts a line comment.
struct SExpr {
  bool is_atom = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;

  bool is_list() const { return !is_atom; }
  bool is_symbol(std::string_view s) const { return is_atom && atom == s; }
  /// Head symbol of a non-empty list, or "" otherwise.
  std::string head() const;
  std::string to_string() const;
};

/// Parses every top-level expression. Throws ParseError with line/column.
std::vector<SExpr> parse_sexprs(std::string_view text);

} // namespace datamon
