// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <variant>

#include <fmt/format.h>

#include "condtrap/analysis.hpp"

namespace condtrap {

namespace {

void flag_side(const NotOperand& side, std::vector<Diagnostic>& out) {
  if (side.negations == 0) return;
  Diagnostic d;
  d.code = "A2154";
  d.message = "syntax error in control-flow directive";
  d.severity = "error";
  d.span = side.bang_span;
  out.push_back(std::move(d));
}

void lint_condition(const CondExpr& e, std::vector<Diagnostic>& out) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, BareTest>) {
          // Negated bare tests keep their meaning in the buggy pipeline.
        } else if constexpr (std::is_same_v<T, RelTest>) {
          flag_side(node.lhs, out);
          flag_side(node.rhs, out);
        } else if constexpr (std::is_same_v<T, NotExpr> ||
                             std::is_same_v<T, ParenExpr>) {
          lint_condition(*node.inner, out);
        } else {
          lint_condition(*node.lhs, out);
          lint_condition(*node.rhs, out);
        }
      },
      e.node);
}

}  // namespace

std::string diagnostic_text(const Diagnostic& d, const std::string& file) {
  return fmt::format("{}:{}:{}: {} {}: {}", file, d.span.line, d.span.col,
                     d.severity, d.code, d.message);
}

std::vector<Diagnostic> lint(const IfBlock& block) {
  std::vector<Diagnostic> out;
  lint_condition(block.cond, out);
  for (const auto& [cond, body] : block.elseifs) lint_condition(cond, out);
  return out;
}

}  // namespace condtrap
