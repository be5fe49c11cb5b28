#pragma once

#include <stdexcept>
#include <string>

namespace owa {

// Syntax-level failure while reading domain/problem text. line/col are
// 1-based; 0 means "not tied to a location".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line = 0, int col = 0)
      : std::runtime_error(format(msg, line, col)), line_(line), col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string format(const std::string& msg, int line, int col) {
    if (line <= 0) return msg;
    return std::to_string(line) + ":" + std::to_string(col) + ": " + msg;
  }
  int line_ = 0;
  int col_ = 0;
};

// Undeclared type/predicate, arity mismatch, or argument type mismatch.
class TypeError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Redefinition of a name within its category.
class DuplicateNameError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Problem references an entity the domain does not declare.
class UnknownEntityError : public ParseError {
 public:
  using ParseError::ParseError;
};

// apply() called on a state that does not satisfy the preconditions.
class NotApplicableError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// step() called after the episode already terminated or truncated.
class EpisodeFinishedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Bad scenario name handed to novelty injection.
class UnknownScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing or unreadable fixture file.
class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace owa
