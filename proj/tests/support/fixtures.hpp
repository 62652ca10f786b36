#pragma once

#include "datamon/parser.hpp"
#include "datamon/theory.hpp"
#include "datamon/trace.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(DATAMON_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline const char* concert_signature_text() {
  return R"((sort Ticket)
(sort Concert)
(sort Real :rational)
(fun price (Ticket) Real)
(fun con (Ticket) Concert)
(const undef Ticket)
(const myc Concert)
(const t123 Ticket)
(var t Ticket)
(var b Ticket)
)";
}

inline datamon::Formula formula(const std::string& text, const datamon::Signature& sig) {
  return datamon::parse_formula(text, sig);
}

} // namespace fixtures
