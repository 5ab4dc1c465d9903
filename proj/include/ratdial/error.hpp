#pragma once

#include <stdexcept>
#include <string>

namespace ratdial {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual input (matrix grids, dialogue strings, rationals).
/// Line and column are 1-based; 0 means "not applicable".
struct ParseError : Error {
  ParseError(const std::string& what, int line_ = 0, int column_ = 0)
      : Error(format(what, line_, column_)), line(line_), column(column_) {}
  int line;
  int column;

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return what + " (line " + std::to_string(line) + ", column " +
           std::to_string(column) + ")";
  }
};

/// Internal consistency failure. Indicates a bug in the engine, never a
/// property of the model under simulation.
struct EngineError : Error {
  using Error::Error;
};

}  // namespace ratdial
