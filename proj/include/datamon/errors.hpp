#pragma once

#include <stdexcept>
#include <string>

namespace datamon {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Concrete syntax error; carries a 1-based position.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

class TypeError : public Error {
public:
  using Error::Error;
};

/// A backend was asked to reason about atoms outside its fragment.
class UnsupportedError : public Error {
public:
  using Error::Error;
};

/// A budget (deadline, node cap, state cap) was exhausted. Never a verdict.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// The fact base does not determine the truth of some atom.
class InsufficientFacts : public Error {
public:
  InsufficientFacts(const std::string& msg, std::string constraint)
      : Error(msg), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

private:
  std::string constraint_;
};

} // namespace datamon

namespace datamon {

/// Run-time failure of a monitoring session (unsafe lookback, no or several
/// consistent transitions).
class MonitorError : public Error {
public:
  using Error::Error;
};

} // namespace datamon
