// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// A tiny x86-ish interpreter for lowered programs: eight 32-bit registers,
// ZF and CF only, a symbolic memory map, and a 4 KiB byte-addressed stack.
// esp starts at the top of the stack region; contents below esp stay
// readable until overwritten.  All arithmetic wraps mod 2^32.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "condtrap/ir.hpp"
#include "condtrap/semantics.hpp"

namespace condtrap {

struct MachineConfig {
  uint32_t stack_low = 0xF000;    // lowest valid stack address
  uint32_t stack_size = 4096;     // bytes; entry esp = stack_low + stack_size
  uint64_t step_limit = 10000;    // executing past this many steps traps

  uint32_t entry_esp() const { return stack_low + stack_size; }
};

struct MachineState {
  std::array<uint32_t, 8> regs{};       // indexed per kRegisters order
  std::array<bool, 8> reg_bound{};      // reading an unbound register traps
  bool zf = false;
  bool cf = false;
  std::map<std::string, uint32_t> memory;
  std::vector<uint8_t> stack;
  std::size_t ip = 0;
  uint64_t steps = 0;
  bool halted = false;
  std::vector<std::string> marks;       // block ids reached, in order
  std::vector<uint32_t> mark_esps;      // esp observed at each MARK

  uint32_t esp() const;
};

struct TraceEntry {
  std::size_t ip = 0;       // index of the instruction that just executed
  std::string text;         // its assembly form
  bool zf = false;          // flags and esp after the step
  bool cf = false;
  uint32_t esp = 0;
};

// `ip | instruction | ZF CF | esp`
std::string trace_line(const TraceEntry& entry);

using TraceSink = std::function<void(const TraceEntry&)>;

struct ExecutionResult {
  std::vector<std::string> marks;
  std::vector<uint32_t> mark_esps;
  MachineState final_state;
  uint64_t steps = 0;
};

// Validates labels up front (UndefinedLabel / DuplicateLabel) and provides
// single-stepping so execution can be observed or replayed.
class Machine {
 public:
  Machine(const LoweredProgram& program, MachineConfig config = {});

  // Fresh state with registers and memory bound from env.  Binding `esp` is
  // rejected: the machine owns the stack pointer.
  MachineState make_initial(const Environment& env) const;

  // Executes the instruction at state.ip.  Throws the machine traps
  // (StackOverflow, StackUnderflow, StepLimitExceeded, UnboundOperand).
  // No-op once state.halted is set.
  void step(MachineState& state, const TraceSink& trace = nullptr) const;

  ExecutionResult run(const Environment& env, const TraceSink& trace = nullptr) const;

  const MachineConfig& config() const { return config_; }

 private:
  LoweredProgram program_;
  MachineConfig config_;
  std::map<std::string, std::size_t> label_index_;

  uint32_t read_operand(const MachineState& s, const IrOperand& op) const;
  void write_operand(MachineState& s, const IrOperand& op, uint32_t value) const;
  uint32_t read32(const MachineState& s, uint32_t addr) const;
  void write32(MachineState& s, uint32_t addr, uint32_t value) const;
  void set_esp(MachineState& s, uint32_t value) const;
};

// One-shot convenience wrapper.
ExecutionResult execute(const LoweredProgram& program, const Environment& env,
                        MachineConfig config = {}, const TraceSink& trace = nullptr);

}  // namespace condtrap
