#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evidx {

/// Process exit codes shared by every command.
enum class ExitCode : int {
  kOk = 0,
  kDomainViolation = 1,
  kInputError = 2,
  kBackendError = 3,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

/// Malformed or inconsistent input files (gold JSON, corpus layout, flags).
class InputError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kInputError; }
};

/// Transport failures, exhausted retries, and replay cache misses.
class BackendError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::kBackendError; }
};

/// Replay mode asked for a request key that is not in the cache.
class ReplayMissError : public BackendError {
 public:
  explicit ReplayMissError(std::vector<std::string> keys);

  const std::vector<std::string>& keys() const noexcept { return keys_; }

 private:
  std::vector<std::string> keys_;
};

}  // namespace evidx
