#pragma once

#include <stdexcept>
#include <string>

namespace lgeo {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (wrong shape, non-finite entries, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Mathematically undefined evaluation, e.g. Omega at the origin.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Binary or text file does not match its declared layout.
class FormatError : public InputError {
 public:
  FormatError(const std::string& what, long long offset = -1)
      : InputError(offset >= 0 ? what + " (at byte " + std::to_string(offset) + ")" : what),
        offset_(offset) {}
  long long offset() const noexcept { return offset_; }

 private:
  long long offset_;
};

/// Text parse failure tied to a line of the input.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

/// A fit or iterative procedure could not produce a reliable answer.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace lgeo
