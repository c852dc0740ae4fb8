// SPDX-License-Identifier: Apache-2.0
#include "fflock/error.hpp"

namespace fflock {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UndefinedSignal: return "UndefinedSignal";
    case ErrorKind::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorKind::CombinationalCycle: return "CombinationalCycle";
    case ErrorKind::BadArity: return "BadArity";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::WidthMismatch: return "WidthMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::KeyTooLarge: return "KeyTooLarge";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::NotPermutation: return "NotPermutation";
    case ErrorKind::ControllerPresent: return "ControllerPresent";
    case ErrorKind::MissingCell: return "MissingCell";
    case ErrorKind::EmptyAffectedOutputs: return "EmptyAffectedOutputs";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return 3;
    case ErrorKind::Syntax:
    case ErrorKind::UndefinedSignal:
    case ErrorKind::DuplicateDefinition:
    case ErrorKind::CombinationalCycle:
    case ErrorKind::BadArity: return 4;
    case ErrorKind::UnknownId:
    case ErrorKind::WidthMismatch:
    case ErrorKind::InvalidArgument:
    case ErrorKind::NotPermutation: return 5;
    case ErrorKind::KeyTooLarge: return 6;
    case ErrorKind::NoCandidates: return 7;
    case ErrorKind::ControllerPresent: return 8;
    case ErrorKind::MissingCell: return 9;
    case ErrorKind::EmptyAffectedOutputs: return 10;
  }
  return 1;
}

Error::Error(ErrorKind kind, const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      kind_(kind),
      line_(line) {}

}  // namespace fflock
