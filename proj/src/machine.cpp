// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/machine.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace condtrap {

namespace {

constexpr std::size_t kEspIndex = 7;  // kRegisters position of "esp"

}  // namespace

uint32_t MachineState::esp() const { return regs[kEspIndex]; }

std::string trace_line(const TraceEntry& entry) {
  return fmt::format("{:>4} | {:<24} | ZF={:d} CF={:d} | esp=0x{:08x}", entry.ip,
                     entry.text, entry.zf, entry.cf, entry.esp);
}

Machine::Machine(const LoweredProgram& program, MachineConfig config)
    : program_(program), config_(config) {
  for (std::size_t i = 0; i < program_.instructions.size(); ++i) {
    const Instruction& ins = program_.instructions[i];
    if (ins.op == Opcode::Label) {
      if (label_index_.count(ins.target) != 0) throw DuplicateLabel(ins.target);
      label_index_.emplace(ins.target, i);
    }
  }
  for (const Instruction& ins : program_.instructions) {
    if ((ins.op == Opcode::Jcc || ins.op == Opcode::Jmp) &&
        label_index_.count(ins.target) == 0) {
      throw UndefinedLabel(ins.target);
    }
  }
}

MachineState Machine::make_initial(const Environment& env) const {
  MachineState s;
  s.stack.assign(config_.stack_size, 0);
  for (const auto& [name, value] : env) {
    if (name == "esp") {
      throw std::invalid_argument("cannot bind esp: the machine owns the stack pointer");
    }
    if (std::optional<int> idx = register_index(name)) {
      s.regs[static_cast<std::size_t>(*idx)] = value;
      s.reg_bound[static_cast<std::size_t>(*idx)] = true;
    } else {
      s.memory[name] = value;
    }
  }
  s.regs[kEspIndex] = config_.entry_esp();
  s.reg_bound[kEspIndex] = true;
  return s;
}

uint32_t Machine::read32(const MachineState& s, uint32_t addr) const {
  if (addr < config_.stack_low) {
    throw StackOverflow(fmt::format("stack read at 0x{:08x} below the stack region", addr));
  }
  if (static_cast<uint64_t>(addr) + 4 > config_.entry_esp()) {
    throw StackUnderflow(fmt::format("stack read at 0x{:08x} above the stack region", addr));
  }
  const std::size_t base = addr - config_.stack_low;
  return static_cast<uint32_t>(s.stack[base]) |
         static_cast<uint32_t>(s.stack[base + 1]) << 8 |
         static_cast<uint32_t>(s.stack[base + 2]) << 16 |
         static_cast<uint32_t>(s.stack[base + 3]) << 24;
}

void Machine::write32(MachineState& s, uint32_t addr, uint32_t value) const {
  if (addr < config_.stack_low) {
    throw StackOverflow(fmt::format("stack write at 0x{:08x} below the stack region", addr));
  }
  if (static_cast<uint64_t>(addr) + 4 > config_.entry_esp()) {
    throw StackUnderflow(fmt::format("stack write at 0x{:08x} above the stack region", addr));
  }
  const std::size_t base = addr - config_.stack_low;
  s.stack[base] = static_cast<uint8_t>(value);
  s.stack[base + 1] = static_cast<uint8_t>(value >> 8);
  s.stack[base + 2] = static_cast<uint8_t>(value >> 16);
  s.stack[base + 3] = static_cast<uint8_t>(value >> 24);
}

void Machine::set_esp(MachineState& s, uint32_t value) const {
  if (value < config_.stack_low) {
    throw StackOverflow(
        fmt::format("esp=0x{:08x} fell below the stack region", value));
  }
  if (value > config_.entry_esp()) {
    throw StackUnderflow(
        fmt::format("esp=0x{:08x} rose above the entry stack pointer", value));
  }
  s.regs[kEspIndex] = value;
}

uint32_t Machine::read_operand(const MachineState& s, const IrOperand& op) const {
  switch (op.kind) {
    case IrOperand::Kind::Imm:
      return op.value;
    case IrOperand::Kind::Reg: {
      const std::size_t idx =
          static_cast<std::size_t>(register_index(op.name).value());
      if (!s.reg_bound[idx]) throw UnboundOperand(op.name);
      return s.regs[idx];
    }
    case IrOperand::Kind::Mem: {
      auto it = s.memory.find(op.name);
      if (it == s.memory.end()) throw UnboundOperand(op.name);
      return it->second;
    }
    case IrOperand::Kind::Slot:
      return read32(s, s.esp() + op.value);
  }
  return 0;
}

void Machine::write_operand(MachineState& s, const IrOperand& op, uint32_t value) const {
  switch (op.kind) {
    case IrOperand::Kind::Reg: {
      const std::size_t idx =
          static_cast<std::size_t>(register_index(op.name).value());
      if (idx == kEspIndex) {
        set_esp(s, value);
      } else {
        s.regs[idx] = value;
        s.reg_bound[idx] = true;
      }
      return;
    }
    case IrOperand::Kind::Mem:
      s.memory[op.name] = value;
      return;
    case IrOperand::Kind::Slot:
      write32(s, s.esp() + op.value, value);
      return;
    case IrOperand::Kind::Imm:
      throw Error("cannot write to an immediate operand");
  }
}

void Machine::step(MachineState& s, const TraceSink& trace) const {
  if (s.halted) return;
  if (s.steps >= config_.step_limit) {
    throw StepLimitExceeded(
        fmt::format("step limit of {} exceeded", config_.step_limit));
  }
  if (s.ip >= program_.instructions.size()) {
    throw Error(fmt::format("instruction pointer {} ran off the program", s.ip));
  }

  const std::size_t ip = s.ip;
  const Instruction& ins = program_.instructions[ip];
  std::size_t next_ip = ip + 1;
  switch (ins.op) {
    case Opcode::Mov:
      write_operand(s, ins.args[0], read_operand(s, ins.args[1]));
      break;
    case Opcode::Cmp: {
      const uint32_t a = read_operand(s, ins.args[0]);
      const uint32_t b = read_operand(s, ins.args[1]);
      s.zf = a == b;
      s.cf = a < b;
      break;
    }
    case Opcode::Or: {
      const uint32_t result =
          read_operand(s, ins.args[0]) | read_operand(s, ins.args[1]);
      write_operand(s, ins.args[0], result);
      s.zf = result == 0;
      s.cf = false;
      break;
    }
    case Opcode::Test: {
      const uint32_t result =
          read_operand(s, ins.args[0]) & read_operand(s, ins.args[1]);
      s.zf = result == 0;
      s.cf = false;
      break;
    }
    case Opcode::Push: {
      const uint32_t value = read_operand(s, ins.args[0]);
      set_esp(s, s.esp() - 4);
      write32(s, s.esp(), value);
      break;
    }
    case Opcode::Pop: {
      const uint32_t value = read32(s, s.esp());
      write_operand(s, ins.args[0], value);
      set_esp(s, s.esp() + 4);
      break;
    }
    case Opcode::Add: {
      const uint64_t sum = static_cast<uint64_t>(read_operand(s, ins.args[0])) +
                           static_cast<uint64_t>(read_operand(s, ins.args[1]));
      const uint32_t result = static_cast<uint32_t>(sum);
      write_operand(s, ins.args[0], result);
      s.zf = result == 0;
      s.cf = sum > 0xFFFFFFFFull;
      break;
    }
    case Opcode::Jcc: {
      bool taken = false;
      switch (ins.cc) {
        case Cc::E: taken = s.zf; break;
        case Cc::Ne: taken = !s.zf; break;
        case Cc::B: taken = s.cf; break;
        case Cc::Be: taken = s.cf || s.zf; break;
        case Cc::A: taken = !s.cf && !s.zf; break;
        case Cc::Ae: taken = !s.cf; break;
      }
      if (taken) next_ip = label_index_.at(ins.target);
      break;
    }
    case Opcode::Jmp:
      next_ip = label_index_.at(ins.target);
      break;
    case Opcode::Label:
      break;  // no-op step
    case Opcode::Mark:
      s.marks.push_back(ins.target);
      s.mark_esps.push_back(s.esp());
      break;
    case Opcode::Halt:
      s.halted = true;
      break;
  }
  s.ip = next_ip;
  ++s.steps;

  if (trace) {
    TraceEntry entry;
    entry.ip = ip;
    entry.text = instruction_text(ins);
    entry.zf = s.zf;
    entry.cf = s.cf;
    entry.esp = s.esp();
    trace(entry);
  }
}

ExecutionResult Machine::run(const Environment& env, const TraceSink& trace) const {
  MachineState s = make_initial(env);
  while (!s.halted) step(s, trace);
  ExecutionResult r;
  r.marks = s.marks;
  r.mark_esps = s.mark_esps;
  r.steps = s.steps;
  r.final_state = std::move(s);
  return r;
}

ExecutionResult execute(const LoweredProgram& program, const Environment& env,
                        MachineConfig config, const TraceSink& trace) {
  return Machine(program, config).run(env, trace);
}

}  // namespace condtrap
