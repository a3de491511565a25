// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Short-circuit lowering of `.if` blocks, in two modes.
//
//   Mode::Correct materializes every `!` written on a comparison side
//   through a stack temporary: PUSH 0, test the side against 0, and set the
//   slot to 1 when the side was 0.  One slot per bang, no parity folding.
//   Slots are released (ADD esp, 4*n) on BOTH the taken and not-taken paths
//   before any MARK can execute, so the stack is balanced whatever the
//   condition decides.
//
//   Mode::Buggy reproduces the historical ml behavior: negations on
//   comparison sides simply vanish, so `!eax == ebx` compiles exactly like
//   `eax == ebx`.  Negated bare tests and negated parenthesized conditions
//   are unaffected in both modes.
//
// Shape conventions (deterministic, covered by golden tests):
//   - every `&&` clause jumps to the current false-target on failure;
//   - `||` alternatives jump to a local true-label, the last alternative
//     falling through to the false-target;
//   - `!(...)` swaps the true/false targets of the inner condition;
//   - a bare register test is `OR reg, reg`, anything else is `CMP x, 0`,
//     with the jump condition inverted once per written bang;
//   - then/elseif/else bodies lower to a single MARK (bodies are opaque);
//   - the program ends with HALT on every path.

#pragma once

#include "condtrap/ast.hpp"
#include "condtrap/ir.hpp"
#include "condtrap/semantics.hpp"

namespace condtrap {

LoweredProgram lower(const IfBlock& block, Mode mode);

// Jump-if-false condition code for a relational operator (unsigned):
// Eq->Ne, Ne->E, Lt->Ae, Le->A, Gt->Be, Ge->B.
Cc rel_false_cc(RelOp op);
// Jump-if-true condition code: Eq->E, Ne->Ne, Lt->B, Le->Be, Gt->A, Ge->Ae.
Cc rel_true_cc(RelOp op);

}  // namespace condtrap
