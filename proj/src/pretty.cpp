// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/pretty.hpp"

#include <variant>

namespace condtrap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string statement_text(const BodyStmt& s) {
  switch (s.kind) {
    case BodyStmt::Kind::Nop:
      return "nop";
    case BodyStmt::Kind::Mov:
      return "mov " + s.reg + ", " + std::to_string(s.imm);
    case BodyStmt::Kind::Add:
      return "add " + s.reg + ", " + std::to_string(s.imm);
  }
  return {};
}

void print_body(const Body& body, std::string& out) {
  for (const BodyStmt& s : body.stmts) {
    out += "    ";
    out += statement_text(s);
    out += '\n';
  }
}

}  // namespace

std::string operand_text(const Operand& op) {
  if (op.kind == OperandKind::Immediate) return std::to_string(op.value);
  return op.name;
}

std::string not_operand_text(const NotOperand& op) {
  return std::string(static_cast<std::size_t>(op.negations), '!') +
         operand_text(op.operand);
}

std::string pretty_print(const CondExpr& cond) {
  return std::visit(
      overloaded{
          [](const BareTest& b) { return not_operand_text(b.test); },
          [](const RelTest& r) {
            return not_operand_text(r.lhs) + " " + std::string(rel_op_text(r.op)) +
                   " " + not_operand_text(r.rhs);
          },
          [](const NotExpr& n) { return "!" + pretty_print(*n.inner); },
          [](const AndExpr& a) {
            return pretty_print(*a.lhs) + " && " + pretty_print(*a.rhs);
          },
          [](const OrExpr& o) {
            return pretty_print(*o.lhs) + " || " + pretty_print(*o.rhs);
          },
          [](const ParenExpr& p) { return "(" + pretty_print(*p.inner) + ")"; },
      },
      cond.node);
}

std::string pretty_print(const IfBlock& block) {
  std::string out = ".if " + pretty_print(block.cond) + "\n";
  print_body(block.then_body, out);
  for (const auto& [cond, body] : block.elseifs) {
    out += ".elseif " + pretty_print(cond) + "\n";
    print_body(body, out);
  }
  if (block.else_body) {
    out += ".else\n";
    print_body(*block.else_body, out);
  }
  out += ".endif\n";
  return out;
}

}  // namespace condtrap
