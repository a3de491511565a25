// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/ir.hpp"

#include <map>

#include <fmt/format.h>
#include <json.hpp>

namespace condtrap {

IrOperand IrOperand::reg(std::string name) {
  return IrOperand{Kind::Reg, std::move(name), 0};
}

IrOperand IrOperand::mem(std::string name) {
  return IrOperand{Kind::Mem, std::move(name), 0};
}

IrOperand IrOperand::imm(uint32_t value) { return IrOperand{Kind::Imm, {}, value}; }

IrOperand IrOperand::slot(uint32_t esp_offset) {
  return IrOperand{Kind::Slot, {}, esp_offset};
}

std::string_view cc_mnemonic(Cc cc) {
  switch (cc) {
    case Cc::E: return "je";
    case Cc::Ne: return "jne";
    case Cc::B: return "jb";
    case Cc::Be: return "jbe";
    case Cc::A: return "ja";
    case Cc::Ae: return "jae";
  }
  return "";
}

Cc invert_cc(Cc cc) {
  switch (cc) {
    case Cc::E: return Cc::Ne;
    case Cc::Ne: return Cc::E;
    case Cc::B: return Cc::Ae;
    case Cc::Ae: return Cc::B;
    case Cc::Be: return Cc::A;
    case Cc::A: return Cc::Be;
  }
  return Cc::E;
}

Instruction Instruction::mov(IrOperand dst, IrOperand src) {
  return Instruction{Opcode::Mov, {std::move(dst), std::move(src)}, Cc::E, {}};
}

Instruction Instruction::cmp(IrOperand lhs, IrOperand rhs) {
  return Instruction{Opcode::Cmp, {std::move(lhs), std::move(rhs)}, Cc::E, {}};
}

Instruction Instruction::or_(IrOperand dst, IrOperand src) {
  return Instruction{Opcode::Or, {std::move(dst), std::move(src)}, Cc::E, {}};
}

Instruction Instruction::test(IrOperand lhs, IrOperand rhs) {
  return Instruction{Opcode::Test, {std::move(lhs), std::move(rhs)}, Cc::E, {}};
}

Instruction Instruction::push(IrOperand src) {
  return Instruction{Opcode::Push, {std::move(src)}, Cc::E, {}};
}

Instruction Instruction::pop(IrOperand dst) {
  return Instruction{Opcode::Pop, {std::move(dst)}, Cc::E, {}};
}

Instruction Instruction::add(IrOperand dst, IrOperand src) {
  return Instruction{Opcode::Add, {std::move(dst), std::move(src)}, Cc::E, {}};
}

Instruction Instruction::jcc(Cc cc, std::string target) {
  return Instruction{Opcode::Jcc, {}, cc, std::move(target)};
}

Instruction Instruction::jmp(std::string target) {
  return Instruction{Opcode::Jmp, {}, Cc::E, std::move(target)};
}

Instruction Instruction::label(std::string name) {
  return Instruction{Opcode::Label, {}, Cc::E, std::move(name)};
}

Instruction Instruction::mark(std::string block_id) {
  return Instruction{Opcode::Mark, {}, Cc::E, std::move(block_id)};
}

Instruction Instruction::halt() { return Instruction{Opcode::Halt, {}, Cc::E, {}}; }

namespace {

std::string ir_operand_text(const IrOperand& op) {
  switch (op.kind) {
    case IrOperand::Kind::Reg:
    case IrOperand::Kind::Mem:
      return op.name;
    case IrOperand::Kind::Imm:
      return std::to_string(op.value);
    case IrOperand::Kind::Slot:
      return fmt::format("[esp+{}]", op.value);
  }
  return {};
}

std::string_view opcode_mnemonic(Opcode op) {
  switch (op) {
    case Opcode::Mov: return "mov";
    case Opcode::Cmp: return "cmp";
    case Opcode::Or: return "or";
    case Opcode::Test: return "test";
    case Opcode::Push: return "push";
    case Opcode::Pop: return "pop";
    case Opcode::Add: return "add";
    case Opcode::Jcc: return "jcc";
    case Opcode::Jmp: return "jmp";
    case Opcode::Label: return "label";
    case Opcode::Mark: return "mark";
    case Opcode::Halt: return "halt";
  }
  return "";
}

}  // namespace

std::string instruction_text(const Instruction& ins) {
  switch (ins.op) {
    case Opcode::Label:
      return ins.target + ":";
    case Opcode::Mark:
      return "mark " + ins.target;
    case Opcode::Halt:
      return "halt";
    case Opcode::Jmp:
      return "jmp " + ins.target;
    case Opcode::Jcc:
      return std::string(cc_mnemonic(ins.cc)) + " " + ins.target;
    default: {
      std::string out{opcode_mnemonic(ins.op)};
      for (std::size_t i = 0; i < ins.args.size(); ++i) {
        out += i == 0 ? " " : ", ";
        out += ir_operand_text(ins.args[i]);
      }
      return out;
    }
  }
}

std::string program_text(const LoweredProgram& p) {
  std::string out;
  for (const Instruction& ins : p.instructions) {
    out += instruction_text(ins);
    out += '\n';
  }
  return out;
}

std::string program_json(const LoweredProgram& p, bool pretty) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Instruction& ins : p.instructions) {
    nlohmann::ordered_json j;
    switch (ins.op) {
      case Opcode::Jcc:
        j["op"] = std::string(cc_mnemonic(ins.cc));
        j["target"] = ins.target;
        break;
      case Opcode::Jmp:
      case Opcode::Label:
      case Opcode::Mark:
        j["op"] = std::string(opcode_mnemonic(ins.op));
        j["target"] = ins.target;
        break;
      case Opcode::Halt:
        j["op"] = "halt";
        break;
      default: {
        j["op"] = std::string(opcode_mnemonic(ins.op));
        nlohmann::ordered_json args = nlohmann::ordered_json::array();
        for (const IrOperand& arg : ins.args) args.push_back(ir_operand_text(arg));
        j["args"] = std::move(args);
        break;
      }
    }
    arr.push_back(std::move(j));
  }
  return pretty ? arr.dump(2) : arr.dump();
}

LoweredProgram normalize_labels(const LoweredProgram& p) {
  std::map<std::string, std::string> rename;
  for (const Instruction& ins : p.instructions) {
    if (ins.op == Opcode::Label) {
      if (rename.count(ins.target) != 0) throw DuplicateLabel(ins.target);
      rename.emplace(ins.target, "L" + std::to_string(rename.size()));
    }
  }
  LoweredProgram out;
  out.instructions.reserve(p.instructions.size());
  for (Instruction ins : p.instructions) {
    if (ins.op == Opcode::Label) {
      ins.target = rename.at(ins.target);
    } else if (ins.op == Opcode::Jcc || ins.op == Opcode::Jmp) {
      auto it = rename.find(ins.target);
      if (it == rename.end()) throw UndefinedLabel(ins.target);
      ins.target = it->second;
    }
    out.instructions.push_back(std::move(ins));
  }
  return out;
}

}  // namespace condtrap
