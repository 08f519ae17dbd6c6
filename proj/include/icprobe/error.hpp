#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icprobe {

enum class ErrorKind {
  kValidation,
  kCapability,
  kBackend,
  kProtocol,
  kUnscorable,
  kNumerical,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid input data. Carries the location when it comes from a file;
/// line is 1-based and 0 when not applicable.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message);
  ValidationError(std::string file, std::size_t line, std::string field,
                  const std::string& message);

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::size_t line_ = 0;
  std::string field_;
};

// Requested (backend, mode) combination has no admissible scoring method.
class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what)
      : Error(ErrorKind::kCapability, what) {}
};

// Transport level failure. Retryable failures are retried by the HTTP backend.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retryable)
      : Error(ErrorKind::kBackend, what), retryable_(retryable) {}
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

// Backend answered, but the answer breaks the wire contract.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorKind::kProtocol, what) {}
};

// Backend refused a candidate (e.g. not a single vocabulary token).
class UnscorableError : public Error {
 public:
  explicit UnscorableError(const std::string& what)
      : Error(ErrorKind::kUnscorable, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace icprobe
