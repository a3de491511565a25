// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/ast.hpp"

#include <algorithm>

namespace condtrap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Node = std::variant<BareTest, RelTest, NotExpr, AndExpr, OrExpr, ParenExpr>;

}  // namespace

std::optional<int> register_index(std::string_view name) {
  for (std::size_t i = 0; i < kRegisters.size(); ++i) {
    if (kRegisters[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

Operand Operand::reg(std::string name) {
  return Operand{OperandKind::Register, std::move(name), 0};
}

Operand Operand::mem(std::string name) {
  return Operand{OperandKind::Memory, std::move(name), 0};
}

Operand Operand::imm(uint32_t value) {
  return Operand{OperandKind::Immediate, {}, value};
}

Operand Operand::named(std::string name) {
  const OperandKind kind =
      is_register(name) ? OperandKind::Register : OperandKind::Memory;
  return Operand{kind, std::move(name), 0};
}

std::string_view rel_op_text(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "";
}

NotOperand make_notop(Operand op, int negations) {
  NotOperand n;
  n.negations = negations;
  n.operand = std::move(op);
  return n;
}

CondExpr make_bare(NotOperand test) {
  CondExpr e;
  e.node = BareTest{std::move(test)};
  return e;
}

CondExpr make_bare(Operand op, int negations) {
  return make_bare(make_notop(std::move(op), negations));
}

CondExpr make_rel(RelOp op, NotOperand lhs, NotOperand rhs) {
  CondExpr e;
  e.node = RelTest{op, std::move(lhs), std::move(rhs)};
  return e;
}

CondExpr make_not(CondExpr inner) {
  CondExpr e;
  e.node = NotExpr{std::make_unique<CondExpr>(std::move(inner))};
  return e;
}

CondExpr make_and(CondExpr lhs, CondExpr rhs) {
  CondExpr e;
  e.node = AndExpr{std::make_unique<CondExpr>(std::move(lhs)),
                   std::make_unique<CondExpr>(std::move(rhs))};
  return e;
}

CondExpr make_or(CondExpr lhs, CondExpr rhs) {
  CondExpr e;
  e.node = OrExpr{std::make_unique<CondExpr>(std::move(lhs)),
                  std::make_unique<CondExpr>(std::move(rhs))};
  return e;
}

CondExpr make_paren(CondExpr inner) {
  CondExpr e;
  e.node = ParenExpr{std::make_unique<CondExpr>(std::move(inner))};
  return e;
}

CondExpr clone(const CondExpr& e) {
  CondExpr out;
  out.span = e.span;
  out.node = std::visit(
      overloaded{
          [](const BareTest& b) -> Node { return BareTest{b.test}; },
          [](const RelTest& r) -> Node { return RelTest{r.op, r.lhs, r.rhs}; },
          [](const NotExpr& n) -> Node {
            return NotExpr{std::make_unique<CondExpr>(clone(*n.inner))};
          },
          [](const AndExpr& a) -> Node {
            return AndExpr{std::make_unique<CondExpr>(clone(*a.lhs)),
                           std::make_unique<CondExpr>(clone(*a.rhs))};
          },
          [](const OrExpr& o) -> Node {
            return OrExpr{std::make_unique<CondExpr>(clone(*o.lhs)),
                          std::make_unique<CondExpr>(clone(*o.rhs))};
          },
          [](const ParenExpr& p) -> Node {
            return ParenExpr{std::make_unique<CondExpr>(clone(*p.inner))};
          },
      },
      e.node);
  return out;
}

IfBlock clone(const IfBlock& b) {
  IfBlock out;
  out.cond = clone(b.cond);
  out.then_body = b.then_body;
  out.elseifs.reserve(b.elseifs.size());
  for (const auto& [cond, body] : b.elseifs) {
    out.elseifs.emplace_back(clone(cond), body);
  }
  out.else_body = b.else_body;
  return out;
}

namespace {

bool operand_equal(const Operand& a, const Operand& b) {
  return a.kind == b.kind && a.name == b.name && a.value == b.value;
}

bool notop_equal(const NotOperand& a, const NotOperand& b) {
  return a.negations == b.negations && operand_equal(a.operand, b.operand);
}

bool body_equal(const Body& a, const Body& b) {
  if (a.id != b.id || a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i) {
    const BodyStmt& x = a.stmts[i];
    const BodyStmt& y = b.stmts[i];
    if (x.kind != y.kind || x.reg != y.reg || x.imm != y.imm) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const CondExpr& a, const CondExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      overloaded{
          [&](const BareTest& x) {
            return notop_equal(x.test, std::get<BareTest>(b.node).test);
          },
          [&](const RelTest& x) {
            const RelTest& y = std::get<RelTest>(b.node);
            return x.op == y.op && notop_equal(x.lhs, y.lhs) &&
                   notop_equal(x.rhs, y.rhs);
          },
          [&](const NotExpr& x) {
            return structurally_equal(*x.inner, *std::get<NotExpr>(b.node).inner);
          },
          [&](const AndExpr& x) {
            const AndExpr& y = std::get<AndExpr>(b.node);
            return structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const OrExpr& x) {
            const OrExpr& y = std::get<OrExpr>(b.node);
            return structurally_equal(*x.lhs, *y.lhs) &&
                   structurally_equal(*x.rhs, *y.rhs);
          },
          [&](const ParenExpr& x) {
            return structurally_equal(*x.inner,
                                      *std::get<ParenExpr>(b.node).inner);
          },
      },
      a.node);
}

bool structurally_equal(const IfBlock& a, const IfBlock& b) {
  if (!structurally_equal(a.cond, b.cond)) return false;
  if (!body_equal(a.then_body, b.then_body)) return false;
  if (a.elseifs.size() != b.elseifs.size()) return false;
  for (std::size_t i = 0; i < a.elseifs.size(); ++i) {
    if (!structurally_equal(a.elseifs[i].first, b.elseifs[i].first)) return false;
    if (!body_equal(a.elseifs[i].second, b.elseifs[i].second)) return false;
  }
  if (a.else_body.has_value() != b.else_body.has_value()) return false;
  if (a.else_body && !body_equal(*a.else_body, *b.else_body)) return false;
  return true;
}

int node_count(const CondExpr& e) {
  return std::visit(
      overloaded{
          [](const BareTest& b) { return 1 + b.test.negations; },
          [](const RelTest& r) {
            return 1 + r.lhs.negations + r.rhs.negations;
          },
          [](const NotExpr& n) { return 1 + node_count(*n.inner); },
          [](const AndExpr& a) {
            return 1 + node_count(*a.lhs) + node_count(*a.rhs);
          },
          [](const OrExpr& o) {
            return 1 + node_count(*o.lhs) + node_count(*o.rhs);
          },
          [](const ParenExpr& p) { return node_count(*p.inner); },
      },
      e.node);
}

int depth(const CondExpr& e) {
  return std::visit(
      overloaded{
          [](const BareTest& b) { return 1 + b.test.negations; },
          [](const RelTest& r) {
            return 1 + std::max(1 + r.lhs.negations, 1 + r.rhs.negations);
          },
          [](const NotExpr& n) { return 1 + depth(*n.inner); },
          [](const AndExpr& a) {
            return 1 + std::max(depth(*a.lhs), depth(*a.rhs));
          },
          [](const OrExpr& o) {
            return 1 + std::max(depth(*o.lhs), depth(*o.rhs));
          },
          [](const ParenExpr& p) { return depth(*p.inner); },
      },
      e.node);
}

namespace {

void add_variable(std::vector<std::string>& vars, const Operand& op) {
  if (op.kind == OperandKind::Immediate) return;
  if (std::find(vars.begin(), vars.end(), op.name) == vars.end()) {
    vars.push_back(op.name);
  }
}

void walk_variables(const CondExpr& e, std::vector<std::string>& vars) {
  std::visit(
      overloaded{
          [&](const BareTest& b) { add_variable(vars, b.test.operand); },
          [&](const RelTest& r) {
            add_variable(vars, r.lhs.operand);
            add_variable(vars, r.rhs.operand);
          },
          [&](const NotExpr& n) { walk_variables(*n.inner, vars); },
          [&](const AndExpr& a) {
            walk_variables(*a.lhs, vars);
            walk_variables(*a.rhs, vars);
          },
          [&](const OrExpr& o) {
            walk_variables(*o.lhs, vars);
            walk_variables(*o.rhs, vars);
          },
          [&](const ParenExpr& p) { walk_variables(*p.inner, vars); },
      },
      e.node);
}

}  // namespace

std::vector<std::string> collect_variables(const CondExpr& e) {
  std::vector<std::string> vars;
  walk_variables(e, vars);
  return vars;
}

std::vector<std::string> collect_variables(const IfBlock& b) {
  std::vector<std::string> vars;
  walk_variables(b.cond, vars);
  for (const auto& [cond, body] : b.elseifs) {
    walk_variables(cond, vars);
  }
  return vars;
}

}  // namespace condtrap
