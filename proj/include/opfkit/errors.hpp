#pragma once

#include <stdexcept>
#include <string>

namespace opfkit {

/// Base class for all opfkit-raised errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Case-file or document parsing failure, carries a position when known.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line = 0, int column = 0)
      : Error(line > 0 ? msg + " (line " + std::to_string(line) +
                             (column > 0 ? ", column " + std::to_string(column) : "") + ")"
                       : msg),
        line(line), column(column) {}
  int line = 0;
  int column = 0;
};

/// JSON document does not match the expected schema. `pointer` is a JSON
/// pointer to the offending location.
class SchemaError : public Error {
public:
  SchemaError(const std::string& msg, std::string pointer)
      : Error(msg + " at " + pointer), pointer(std::move(pointer)) {}
  std::string pointer;
};

/// A structural invariant of the data model does not hold.
class InvariantError : public Error {
public:
  using Error::Error;
};

/// A directional patch guard was violated by an offered binding.
class GuardError : public Error {
public:
  using Error::Error;
};

}  // namespace opfkit
