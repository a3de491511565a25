// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace condtrap {

// Base class for every error raised by the toolchain.  Subclasses exist so
// callers (the CLI in particular) can map failure classes to exit codes
// without string-matching messages.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Source text could not be parsed.  line/col are 1-based.
struct ParseError : Error {
  int line;
  int col;
  ParseError(int line, int col, const std::string& what)
      : Error(what), line(line), col(col) {}
};

// A register or memory symbol was read without a binding in the environment.
struct UnboundOperand : Error {
  std::string name;
  explicit UnboundOperand(const std::string& name)
      : Error("unbound operand '" + name + "'"), name(name) {}
};

// |domain|^|variables| exceeds the enumeration cap.
struct DomainTooLarge : Error {
  using Error::Error;
};

// A jump names a label that is never defined.
struct UndefinedLabel : Error {
  std::string label;
  explicit UndefinedLabel(const std::string& label)
      : Error("undefined label '" + label + "'"), label(label) {}
};

// A label is defined more than once in a program.
struct DuplicateLabel : Error {
  std::string label;
  explicit DuplicateLabel(const std::string& label)
      : Error("duplicate label '" + label + "'"), label(label) {}
};

// Machine traps.  These indicate a malformed program or configuration, never
// a legal outcome of executing a lowered condition.
struct StackOverflow : Error {
  using Error::Error;
};
struct StackUnderflow : Error {
  using Error::Error;
};
struct StepLimitExceeded : Error {
  using Error::Error;
};

// Differential testing found the correct-mode pipeline disagreeing with the
// evaluator that defines it.  This is an internal invariant violation: the
// reference semantics and the reference compilation must never diverge.
struct ToolchainMismatch : Error {
  using Error::Error;
};

// Trap synthesis ran past its candidate budget before exhausting the space.
struct SearchSpaceExceeded : Error {
  using Error::Error;
};

}  // namespace condtrap
