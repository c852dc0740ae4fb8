// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fflock {

enum class ErrorKind {
  Syntax,
  UndefinedSignal,
  DuplicateDefinition,
  CombinationalCycle,
  BadArity,
  UnknownId,
  WidthMismatch,
  InvalidArgument,
  KeyTooLarge,
  NoCandidates,
  NotPermutation,
  ControllerPresent,
  MissingCell,
  EmptyAffectedOutputs,
  Io,
};

const char* to_string(ErrorKind kind);

// Distinct process exit code per error class, used by the CLI.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0);

  ErrorKind kind() const noexcept { return kind_; }
  // 1-based source line for parse errors, 0 otherwise.
  int line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  int line_;
};

}  // namespace fflock
