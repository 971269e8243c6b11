#pragma once

#include <stdexcept>
#include <string>

namespace vischase {

/// Coarse error category; the CLI maps these onto process exit codes.
enum class ErrorKind {
  InvalidInput,  // malformed scenario, bad argument, violated invariant
  OutOfRange,    // query outside the grid / time domain
  Infeasible,    // planning could not produce an admissible result
  Io,            // file missing or not writable
  Numerical,     // solver iteration limit and similar
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string stage, const std::string& message)
      : std::runtime_error(message), kind_(kind), stage_(std::move(stage)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& stage() const { return stage_; }

 private:
  ErrorKind kind_;
  std::string stage_;
};

}  // namespace vischase
