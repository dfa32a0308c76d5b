#pragma once

#include <stdexcept>
#include <string>

namespace hdqi {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kCapExceeded = 3,
  kDecoderFailure = 4,
  kVerificationFailure = 5,
};

/// Base class of every error raised by the library. `kind()` is a stable
/// machine-readable tag (e.g. "AmbiguousSyndrome") that the CLI echoes in
/// its JSON error report.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail, ExitCode code)
      : std::runtime_error(detail), kind_(std::move(kind)), code_(code) {}

  const std::string& kind() const noexcept { return kind_; }
  ExitCode exit_code() const noexcept { return code_; }

 private:
  std::string kind_;
  ExitCode code_;
};

/// Malformed input: bad Pauli strings, dimension mismatches, domain errors.
class InputError : public Error {
 public:
  explicit InputError(const std::string& detail, std::string kind = "InputError")
      : Error(std::move(kind), detail, ExitCode::kInputError) {}
};

/// A configured size cap (qubits, bond dimension, table size) was exceeded.
class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& detail, std::string kind = "CapExceeded")
      : Error(std::move(kind), detail, ExitCode::kCapExceeded) {}
};

/// Decoder construction or lookup failed.
class DecoderError : public Error {
 public:
  DecoderError(std::string kind, const std::string& detail)
      : Error(std::move(kind), detail, ExitCode::kDecoderFailure) {}
};

/// An internal consistency check on a computed quantity failed.
class VerificationError : public Error {
 public:
  VerificationError(std::string kind, const std::string& detail)
      : Error(std::move(kind), detail, ExitCode::kVerificationFailure) {}
};

}  // namespace hdqi
