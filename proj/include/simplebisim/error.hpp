#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simplebisim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed grammar, basis, word or session type text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A `%simple` grammar declares two productions for the same (nonterminal, terminal).
class DeterminismError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// An operation was called outside its precondition (non-simple grammar, dead
/// symbols, ill-formed session type, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Argument outside the operation's domain (e.g. k > seminorm).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The basis-updating run exceeded its polynomial iteration or basis-change budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace simplebisim
