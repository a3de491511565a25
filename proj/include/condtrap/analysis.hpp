// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// The three analyses built on top of the parser, the evaluators, the
// lowerer and the machine:
//
//   lint            — flags every condition the buggy pipeline would
//                     miscompile, using the diagnostic the shipped fix made
//                     famous: error A2154.
//   difftest        — runs a block per assignment through eval_correct,
//                     the correct-mode machine and the buggy-mode machine,
//                     reporting rows where the buggy build diverges.
//   synthesize_trap — searches, smallest first, for a condition whose
//                     correct semantics matches an "official" truth table
//                     while its buggy compilation matches a different
//                     "effective" one: a backdoor that passes review.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "condtrap/ast.hpp"
#include "condtrap/machine.hpp"
#include "condtrap/semantics.hpp"

namespace condtrap {

struct Diagnostic {
  std::string code;      // "A2154"
  std::string message;   // "syntax error in control-flow directive"
  std::string severity;  // "error"
  Span span;             // the `!` token run on the offending side
};

// `<file>:<line>:<col>: error A2154: syntax error in control-flow directive`
std::string diagnostic_text(const Diagnostic& d, const std::string& file);

// One diagnostic per comparison side carrying at least one `!`, in source
// order (block conditions first to last, within a condition pre-order,
// left side before right).  Negated bare tests and `!(...)` are fine and
// never flagged.
std::vector<Diagnostic> lint(const IfBlock& block);

struct DivergenceRow {
  std::vector<uint32_t> assign;  // aligned with report variables
  std::string ref;               // block chosen by eval_correct
  std::string correct;           // block reached by correct-mode execution
  std::string buggy;             // block reached by buggy-mode execution
};

struct DivergenceReport {
  std::string condition;                   // pretty-printed `.if` condition
  std::vector<std::string> elseif_conditions;
  std::vector<std::string> variables;
  std::vector<uint32_t> domain;
  std::vector<DivergenceRow> rows;         // row-major over variables/domain
  std::vector<std::size_t> divergent;      // indices where buggy != ref
  bool simple = true;                      // no elseifs: outcomes are then/else

  std::size_t divergent_count() const { return divergent.size(); }
};

// Outcome of evaluating the block's condition chain with the given mode:
// the chosen block id, or "-" when no condition holds and there is no else.
std::string choose_block(const IfBlock& block, const Environment& env, Mode mode);

// Enumerates the full assignment space.  Every row cross-checks the
// machine against the evaluator in BOTH modes; any disagreement with the
// defining evaluator throws ToolchainMismatch (correct mode must match
// eval_correct, buggy mode must match eval_buggy).  A divergence between
// buggy and reference is a finding, not an error.
DivergenceReport difftest(const IfBlock& block, const std::vector<std::string>& variables,
                          const std::vector<uint32_t>& domain,
                          MachineConfig machine_config = {},
                          std::size_t row_cap = kDefaultRowCap);

std::string divergence_report_to_json(const DivergenceReport& r, bool pretty = true);
std::string divergence_report_to_text(const DivergenceReport& r);

// Specification for trap synthesis.  The two tables must share variables
// and domain; `official` is what a reviewer reading the source should
// conclude (don't-care rows allowed), `effective` is what the buggy build
// should actually do.
struct TrapSpec {
  TruthTable official;
  TruthTable effective;
  int depth_limit = 5;
  int max_negations_per_side = 2;
  std::vector<uint32_t> immediates = {0, 1};  // operand pool beyond variables
  uint64_t candidate_budget = 10'000'000;
};

// Exhaustive bounded enumeration, ordered by node count then by canonical
// pretty-printed text.  Returns the first (hence minimal) condition whose
// correct-mode truth table matches `official` and whose buggy-mode table
// matches `effective` on all non-don't-care rows; nullopt when the bounded
// space holds no such condition.  Throws SearchSpaceExceeded past the
// candidate budget and DomainTooLarge for assignment spaces over 64 rows.
std::optional<CondExpr> synthesize_trap(const TrapSpec& spec);

}  // namespace condtrap
