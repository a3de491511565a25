// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// AST for MASM-style `.if` condition blocks.
//
// The shape mirrors the surface grammar rather than a normalized boolean
// algebra: parentheses are preserved as explicit nodes, and `!` applied
// directly to an operand is recorded as a negation COUNT on that operand
// instead of a logical-not node.  That distinction is the whole point of the
// toolchain — `!eax == ebx` (negation on a comparison side) and
// `!(eax == ebx)` (negation of a parenthesized condition) behave identically
// in a correct compiler and completely differently in the buggy one.

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace condtrap {

// Half-open byte range into the source text, plus the 1-based line/column of
// its first byte.  Spans on hand-built (non-parsed) nodes are all zero.
struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;
  int line = 0;
  int col = 0;
};

// The eight general-purpose registers a condition may name.  Any other
// identifier is a memory symbol.
inline constexpr std::array<std::string_view, 8> kRegisters = {
    "eax", "ebx", "ecx", "edx", "esi", "edi", "ebp", "esp"};

std::optional<int> register_index(std::string_view name);
inline bool is_register(std::string_view name) {
  return register_index(name).has_value();
}

enum class OperandKind { Register, Memory, Immediate };

struct Operand {
  OperandKind kind = OperandKind::Immediate;
  std::string name;     // register or memory symbol; empty for immediates
  uint32_t value = 0;   // immediate value; unused otherwise

  static Operand reg(std::string name);
  static Operand mem(std::string name);
  static Operand imm(uint32_t value);
  // Classifies by name: a register if listed in kRegisters, else memory.
  static Operand named(std::string name);
};

// An operand with zero or more immediately preceding `!` tokens.
// `negations` only counts bangs written directly against the operand
// (`!!eax`); a bang in front of a parenthesis never folds into this count.
struct NotOperand {
  int negations = 0;
  Operand operand;
  Span span;       // bangs + operand
  Span bang_span;  // just the `!` run; zero-length when negations == 0
};

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view rel_op_text(RelOp op);

struct CondExpr;
using CondPtr = std::unique_ptr<CondExpr>;

// `.if eax` — truthiness test of a single (possibly negated) operand.
struct BareTest {
  NotOperand test;
};

// `.if lhs == rhs` — unsigned comparison.  Negation counts live on the
// sides; this is the only construct the buggy pipeline mis-handles.
struct RelTest {
  RelOp op = RelOp::Eq;
  NotOperand lhs;
  NotOperand rhs;
};

// `!inner` where inner is a parenthesized condition or another NotExpr.
struct NotExpr {
  CondPtr inner;
};

struct AndExpr {
  CondPtr lhs;
  CondPtr rhs;
};

struct OrExpr {
  CondPtr lhs;
  CondPtr rhs;
};

// Explicit parentheses, preserved so the printer can reproduce them and so
// negation placement stays exactly where the author wrote it.
struct ParenExpr {
  CondPtr inner;
};

struct CondExpr {
  std::variant<BareTest, RelTest, NotExpr, AndExpr, OrExpr, ParenExpr> node;
  Span span;
};

// Builders for tests and the synthesizer.  Spans are left zeroed.
CondExpr make_bare(NotOperand test);
CondExpr make_bare(Operand op, int negations = 0);
CondExpr make_rel(RelOp op, NotOperand lhs, NotOperand rhs);
CondExpr make_not(CondExpr inner);
CondExpr make_and(CondExpr lhs, CondExpr rhs);
CondExpr make_or(CondExpr lhs, CondExpr rhs);
CondExpr make_paren(CondExpr inner);
NotOperand make_notop(Operand op, int negations = 0);

// Body statements are opaque markers: they are parsed and printed so input
// files look like real assembly, but they are never lowered or executed.
struct BodyStmt {
  enum class Kind { Nop, Mov, Add };
  Kind kind = Kind::Nop;
  std::string reg;
  uint32_t imm = 0;
};

struct Body {
  std::string id;  // "then_0", "elseif_1", ..., "else_N"
  std::vector<BodyStmt> stmts;
};

struct IfBlock {
  CondExpr cond;
  Body then_body;
  std::vector<std::pair<CondExpr, Body>> elseifs;
  std::optional<Body> else_body;
};

CondExpr clone(const CondExpr& e);
IfBlock clone(const IfBlock& b);

// Structural equality; spans are ignored, parentheses are not.
bool structurally_equal(const CondExpr& a, const CondExpr& b);
bool structurally_equal(const IfBlock& a, const IfBlock& b);

// Node count: each atom (bare test or comparison) costs 1, every `!` costs 1
// wherever it appears, each boolean connective costs 1, parentheses are
// free.  Used as the minimality measure in synthesis.
int node_count(const CondExpr& e);

// Expression depth: an operand is 1, each `!` on it adds 1, relational and
// boolean connectives add 1, parentheses are transparent.
int depth(const CondExpr& e);

// Register/memory names mentioned by the expression (immediates excluded),
// in order of first appearance.
std::vector<std::string> collect_variables(const CondExpr& e);
std::vector<std::string> collect_variables(const IfBlock& b);

}  // namespace condtrap
