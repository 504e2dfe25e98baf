#pragma once

#include <stdexcept>
#include <string>

namespace drfi {

enum class ErrorKind {
  kUsage,         // bad configuration or command line
  kInvalidInput,  // malformed data handed to an operation
  kData,          // unreadable or corrupt files
  kInvariant,     // internal consistency check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::kInvalidInput, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

class InvariantViolation : public Error {
 public:
  explicit InvariantViolation(const std::string& what) : Error(ErrorKind::kInvariant, what) {}
};

/// Process exit status for an error kind: 1 usage, 2 data, 3 invariant.
int exit_code(ErrorKind kind);

}  // namespace drfi
