// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Linear IR for lowered condition blocks: x86-flavored, but deliberately not
// encodable — memory-to-memory CMP is allowed, MARK/HALT are pseudo
// instructions, and operands carry symbolic names instead of addresses.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "condtrap/errors.hpp"

namespace condtrap {

struct IrOperand {
  enum class Kind { Reg, Mem, Imm, Slot };
  Kind kind = Kind::Imm;
  std::string name;    // Reg / Mem
  uint32_t value = 0;  // Imm value, or Slot byte offset from esp

  static IrOperand reg(std::string name);
  static IrOperand mem(std::string name);
  static IrOperand imm(uint32_t value);
  static IrOperand slot(uint32_t esp_offset);

  bool operator==(const IrOperand&) const = default;
};

// Condition codes for Jcc, unsigned flavor only: ZF and CF are the whole
// flags model.
enum class Cc { E, Ne, B, Be, A, Ae };

std::string_view cc_mnemonic(Cc cc);  // "je", "jne", ...
Cc invert_cc(Cc cc);

enum class Opcode { Mov, Cmp, Or, Test, Push, Pop, Add, Jcc, Jmp, Label, Mark, Halt };

struct Instruction {
  Opcode op = Opcode::Halt;
  std::vector<IrOperand> args;  // operand order matches assembly syntax
  Cc cc = Cc::E;                // Jcc only
  std::string target;           // Jcc/Jmp: label name; Label: name; Mark: block id

  static Instruction mov(IrOperand dst, IrOperand src);
  static Instruction cmp(IrOperand lhs, IrOperand rhs);
  static Instruction or_(IrOperand dst, IrOperand src);
  static Instruction test(IrOperand lhs, IrOperand rhs);
  static Instruction push(IrOperand src);
  static Instruction pop(IrOperand dst);
  static Instruction add(IrOperand dst, IrOperand src);
  static Instruction jcc(Cc cc, std::string target);
  static Instruction jmp(std::string target);
  static Instruction label(std::string name);
  static Instruction mark(std::string block_id);
  static Instruction halt();

  bool operator==(const Instruction&) const = default;
};

struct LoweredProgram {
  std::vector<Instruction> instructions;

  bool operator==(const LoweredProgram&) const = default;
};

// One instruction, assembly-style: `cmp eax, ebx`, `jne Lelse_0`,
// `mov [esp+0], 1`, `Lelse_0:`, `mark then_0`, `halt`.
std::string instruction_text(const Instruction& ins);

// One instruction per line, trailing newline included.
std::string program_text(const LoweredProgram& p);

// JSON array of {"op": ..., "args": [...]} objects; jumps, labels and marks
// carry "target" instead of args.
std::string program_json(const LoweredProgram& p, bool pretty = true);

// Renames labels to L0, L1, ... in order of first definition and rewrites
// every jump target.  Idempotent.  Throws UndefinedLabel for a jump to a
// label that is never defined and DuplicateLabel for a label defined twice.
LoweredProgram normalize_labels(const LoweredProgram& p);

}  // namespace condtrap
