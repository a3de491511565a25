// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "condtrap/ast.hpp"
#include "condtrap/errors.hpp"

namespace condtrap {

// Parses a source file containing exactly one `.if ... .endif` block.
// Comments start with `;` and run to end of line; blank lines are ignored.
// Throws ParseError (with 1-based line/column) on malformed input, including
// chained relational operators (`a == b == c`) and trailing tokens after
// `.endif`.
IfBlock parse_block(std::string_view source);

// Parses a bare condition expression (the part after `.if`).  Used by the
// CLI's --cond flag and by tests.
CondExpr parse_condition(std::string_view source);

}  // namespace condtrap
