// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/lowering.hpp"

#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>

namespace condtrap {

Cc rel_false_cc(RelOp op) {
  switch (op) {
    case RelOp::Eq: return Cc::Ne;
    case RelOp::Ne: return Cc::E;
    case RelOp::Lt: return Cc::Ae;
    case RelOp::Le: return Cc::A;
    case RelOp::Gt: return Cc::Be;
    case RelOp::Ge: return Cc::B;
  }
  return Cc::Ne;
}

Cc rel_true_cc(RelOp op) {
  switch (op) {
    case RelOp::Eq: return Cc::E;
    case RelOp::Ne: return Cc::Ne;
    case RelOp::Lt: return Cc::B;
    case RelOp::Le: return Cc::Be;
    case RelOp::Gt: return Cc::A;
    case RelOp::Ge: return Cc::Ae;
  }
  return Cc::E;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

IrOperand ir_operand(const Operand& op) {
  switch (op.kind) {
    case OperandKind::Register: return IrOperand::reg(op.name);
    case OperandKind::Memory: return IrOperand::mem(op.name);
    case OperandKind::Immediate: return IrOperand::imm(op.value);
  }
  return IrOperand::imm(0);
}

class Lowerer {
 public:
  explicit Lowerer(Mode mode) : mode_(mode) {}

  LoweredProgram lower_block(const IfBlock& block) {
    struct Arm {
      const CondExpr* cond;
      const Body* body;
    };
    std::vector<Arm> arms;
    arms.push_back({&block.cond, &block.then_body});
    for (const auto& [cond, body] : block.elseifs) arms.push_back({&cond, &body});

    const bool has_else = block.else_body.has_value();
    for (std::size_t k = 0; k < arms.size(); ++k) {
      const bool last = k + 1 == arms.size();
      std::string false_target;
      if (!last) {
        false_target = fresh("elseif");
      } else if (has_else) {
        false_target = fresh("else");
      } else {
        false_target = end_label();
      }
      emit_false(*arms[k].cond, false_target);
      emit(Instruction::mark(arms[k].body->id));
      if (!last || has_else) {
        emit(Instruction::jmp(end_label()));
        emit(Instruction::label(false_target));
      }
    }
    if (has_else) emit(Instruction::mark(block.else_body->id));
    emit(Instruction::label(end_label()));
    emit(Instruction::halt());

    LoweredProgram p;
    p.instructions = std::move(ins_);
    return p;
  }

 private:
  Mode mode_;
  int next_label_ = 0;
  std::string end_label_;
  std::vector<Instruction> ins_;

  void emit(Instruction ins) { ins_.push_back(std::move(ins)); }

  std::string fresh(const char* stem) {
    return fmt::format("L{}_{}", stem, next_label_++);
  }

  std::string end_label() {
    if (end_label_.empty()) end_label_ = fresh("end");
    return end_label_;
  }

  // Emits code that jumps to `target` when `e` is FALSE and falls through
  // when it is true.
  void emit_false(const CondExpr& e, const std::string& target) {
    std::visit(
        overloaded{
            [&](const BareTest& b) { emit_bare(b.test, Cc::E, target); },
            [&](const RelTest& r) { emit_rel(r, target, /*jump_if_true=*/false); },
            [&](const NotExpr& n) { emit_true(*n.inner, target); },
            [&](const AndExpr& a) {
              emit_false(*a.lhs, target);
              emit_false(*a.rhs, target);
            },
            [&](const OrExpr& o) {
              const std::string local_true = fresh("true");
              emit_true(*o.lhs, local_true);
              emit_true(*o.rhs, local_true);
              emit(Instruction::jmp(target));
              emit(Instruction::label(local_true));
            },
            [&](const ParenExpr& p) { emit_false(*p.inner, target); },
        },
        e.node);
  }

  // Emits code that jumps to `target` when `e` is TRUE and falls through
  // when it is false.
  void emit_true(const CondExpr& e, const std::string& target) {
    std::visit(
        overloaded{
            [&](const BareTest& b) { emit_bare(b.test, Cc::Ne, target); },
            [&](const RelTest& r) { emit_rel(r, target, /*jump_if_true=*/true); },
            [&](const NotExpr& n) { emit_false(*n.inner, target); },
            [&](const AndExpr& a) {
              const std::string local_false = fresh("false");
              emit_false(*a.lhs, local_false);
              emit_false(*a.rhs, local_false);
              emit(Instruction::jmp(target));
              emit(Instruction::label(local_false));
            },
            [&](const OrExpr& o) {
              emit_true(*o.lhs, target);
              emit_true(*o.rhs, target);
            },
            [&](const ParenExpr& p) { emit_true(*p.inner, target); },
        },
        e.node);
  }

  // Truthiness test of a single operand.  `base_cc` is the jump condition
  // for the bang-free case (E when jumping on false, Ne when jumping on
  // true); every written bang inverts it once, in both modes — bare-test
  // negation is not part of the defect.
  void emit_bare(const NotOperand& op, Cc base_cc, const std::string& target) {
    if (op.operand.kind == OperandKind::Register) {
      emit(Instruction::or_(ir_operand(op.operand), ir_operand(op.operand)));
    } else {
      emit(Instruction::cmp(ir_operand(op.operand), IrOperand::imm(0)));
    }
    Cc cc = base_cc;
    for (int i = 0; i < op.negations; ++i) cc = invert_cc(cc);
    emit(Instruction::jcc(cc, target));
  }

  // Comparison.  The buggy pipeline compares the raw operands, silently
  // dropping every side bang.  The correct pipeline materializes each bang
  // into a freshly pushed stack slot and compares the final slots, then
  // releases the slots on both branch outcomes.
  void emit_rel(const RelTest& r, const std::string& target, bool jump_if_true) {
    const int lhs_slots = mode_ == Mode::Correct ? r.lhs.negations : 0;
    const int rhs_slots = mode_ == Mode::Correct ? r.rhs.negations : 0;
    const int total_slots = lhs_slots + rhs_slots;

    if (total_slots == 0) {
      emit(Instruction::cmp(ir_operand(r.lhs.operand), ir_operand(r.rhs.operand)));
      emit(Instruction::jcc(jump_if_true ? rel_true_cc(r.op) : rel_false_cc(r.op),
                            target));
      return;
    }

    materialize(r.lhs.operand, lhs_slots);
    materialize(r.rhs.operand, rhs_slots);

    const IrOperand lhs_ref = lhs_slots > 0
                                  ? IrOperand::slot(4u * static_cast<uint32_t>(rhs_slots))
                                  : ir_operand(r.lhs.operand);
    const IrOperand rhs_ref =
        rhs_slots > 0 ? IrOperand::slot(0) : ir_operand(r.rhs.operand);
    emit(Instruction::cmp(lhs_ref, rhs_ref));

    // The local label covers the branch outcome that must NOT jump to
    // `target`; both outcomes release the slots before continuing.
    const std::string local = fresh(jump_if_true ? "false" : "true");
    const IrOperand release = IrOperand::imm(4u * static_cast<uint32_t>(total_slots));
    emit(Instruction::jcc(jump_if_true ? rel_false_cc(r.op) : rel_true_cc(r.op),
                          local));
    emit(Instruction::add(IrOperand::reg("esp"), release));
    emit(Instruction::jmp(target));
    emit(Instruction::label(local));
    emit(Instruction::add(IrOperand::reg("esp"), release));
  }

  // One stack slot per bang: the slot starts at 0 and is set to 1 when the
  // tested value is 0.  The first bang tests the original operand, each
  // further bang tests the previous slot (at [esp+4] after the new push).
  void materialize(const Operand& source, int slots) {
    for (int k = 0; k < slots; ++k) {
      emit(Instruction::push(IrOperand::imm(0)));
      const IrOperand tested = k == 0 ? ir_operand(source) : IrOperand::slot(4);
      emit(Instruction::cmp(tested, IrOperand::imm(0)));
      const std::string skip = fresh("skip");
      emit(Instruction::jcc(Cc::Ne, skip));
      emit(Instruction::mov(IrOperand::slot(0), IrOperand::imm(1)));
      emit(Instruction::label(skip));
    }
  }
};

}  // namespace

LoweredProgram lower(const IfBlock& block, Mode mode) {
  return Lowerer(mode).lower_block(block);
}

}  // namespace condtrap
