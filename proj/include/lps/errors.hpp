#pragma once

#include <stdexcept>
#include <string>

namespace lps {

/// Malformed textual input; line and column are 1-based.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what + " at line " + std::to_string(line) + ", column " +
                           std::to_string(column)),
        line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

class DivisionByZero : public std::domain_error {
public:
  DivisionByZero() : std::domain_error("division by zero polynomial") {}
};

/// Raised when an exactness invariant fails. Always a bug.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace lps
