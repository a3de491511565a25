// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Two evaluators for condition expressions:
//
//   eval_correct — the semantics the source text promises.  `!x` on an
//     operand normalizes at the value level: !x is 1 when x == 0 and 0
//     otherwise, applied once per written bang, before any comparison.
//
//   eval_buggy — the semantics the historical ml assembler delivered
//     (CVE-2018-8232): every `!` written on either side of a relational
//     comparison is silently dropped.  Negation on a bare test (`.if !eax`)
//     and negation of a parenthesized condition (`!(...)`) keep their
//     correct meaning; only comparison sides are affected.
//
// Everything is total: && and || evaluate both sides (short-circuiting is a
// lowering concern and conditions have no side effects).  Comparisons are
// unsigned, as with MASM runtime relationals on 32-bit registers.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "condtrap/ast.hpp"
#include "condtrap/errors.hpp"

namespace condtrap {

enum class Mode { Correct, Buggy };

// Name -> 32-bit value, for registers and memory symbols alike.
using Environment = std::map<std::string, uint32_t>;

// Value of an operand under env.  Throws UnboundOperand for a register or
// memory symbol with no binding.
uint32_t operand_value(const Operand& op, const Environment& env);

// Boolean outcome including the "should never happen" marker used when a
// table row is intentionally left unconstrained.
enum class Tristate : uint8_t { False = 0, True = 1, DontCare = 2 };

bool eval_correct(const CondExpr& e, const Environment& env);
bool eval_buggy(const CondExpr& e, const Environment& env);
bool eval(const CondExpr& e, const Environment& env, Mode mode);

// Default enumeration cap for truth tables: |domain|^|variables| rows.
inline constexpr std::size_t kDefaultRowCap = std::size_t{1} << 20;

// The wide domain used to surface divergences that boolean-only inputs can
// mask (e.g. `!a == !b` agrees with `a == b` on {0,1} but not on {0,1,2,...}).
inline const std::vector<uint32_t> kWideDomain = {0, 1, 2, 0xFFFFFFFFu};

struct TruthTable {
  std::vector<std::string> variables;
  std::vector<uint32_t> domain;       // shared by every variable
  std::vector<Tristate> rows;         // row-major; size = |domain|^|variables|

  std::size_t row_count() const { return rows.size(); }
  // Decodes row index -> per-variable values.  Row-major over the declared
  // orderings: the LAST variable varies fastest.
  std::vector<uint32_t> assignment_of(std::size_t index) const;
  std::size_t index_of(const std::vector<uint32_t>& assignment) const;

  bool operator==(const TruthTable&) const = default;
};

// Enumerates e over every assignment.  Throws DomainTooLarge past the cap
// and UnboundOperand if e mentions a name outside `variables`.
TruthTable truth_table(const CondExpr& e, const std::vector<std::string>& variables,
                       const std::vector<uint32_t>& domain, Mode mode,
                       std::size_t row_cap = kDefaultRowCap);

// JSON form: {"variables": [...], "domain": [...],
//             "rows": [{"assign": [...], "out": 0|1|"dc"}, ...]}.
// from_json accepts rows in any order but requires exactly one row per
// assignment in the cartesian product.
std::string truth_table_to_json(const TruthTable& table, bool pretty = true);
TruthTable truth_table_from_json(const std::string& text);

// Text grid for terminal output.
std::string truth_table_to_text(const TruthTable& table);

}  // namespace condtrap
