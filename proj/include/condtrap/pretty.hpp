// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "condtrap/ast.hpp"

namespace condtrap {

// Canonical source text.  parse(pretty_print(x)) reconstructs x exactly
// (spans aside): one space around relational and boolean operators, `!`
// flush against its operand or parenthesis, decimal immediates, four-space
// body indentation.  Never moves a `!` across a parenthesis boundary and
// never inserts or removes parentheses.
std::string pretty_print(const CondExpr& cond);
std::string pretty_print(const IfBlock& block);

std::string operand_text(const Operand& op);
std::string not_operand_text(const NotOperand& op);

}  // namespace condtrap
