#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sensemt {

/// Base class for every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on malformed or incompatible persisted files.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A non-fatal, line-addressed problem found while reading an input file.
struct Diagnostic {
  std::size_t line = 0;  // 1-based; 0 when not tied to a line
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::string format_diagnostic(const std::string& source, const Diagnostic& d);

}  // namespace sensemt
