#pragma once
#include <stdexcept>
#include <string>

namespace magloc {

/// Violated precondition or domain contract. `code` is a short stable
/// identifier (e.g. "invalid-model", "empty-roi") suitable for dispatch;
/// `what()` carries the human-readable detail.
class ContractError : public std::invalid_argument {
 public:
  ContractError(std::string code, const std::string& message)
      : std::invalid_argument(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Malformed input file (raster, config, measurement). Carries the 1-based
/// line number when known, 0 otherwise.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, long line = 0)
      : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                    : message),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Filesystem-level failure (missing file, short read, write error).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magloc
