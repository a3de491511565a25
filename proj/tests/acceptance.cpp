// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one self-contained check per shipped guarantee, each
// printed as a single [PASS]/[FAIL] line with its runtime.  Exits with the
// number of failed checks, so the test runner treats any failure as red.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "condtrap/analysis.hpp"
#include "condtrap/lowering.hpp"
#include "condtrap/machine.hpp"
#include "condtrap/parser.hpp"
#include "condtrap/pretty.hpp"
#include "fuzz_support.hpp"

using namespace condtrap;

namespace {

struct CheckFailure {
  std::string detail;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw CheckFailure{detail};
}

IfBlock wrap(const std::string& cond) {
  return parse_block(".if " + cond + "\n    nop\n.else\n    nop\n.endif\n");
}

Environment env2(uint32_t a, uint32_t b) { return {{"a", a}, {"b", b}}; }

// ---------------------------------------------------------------------------
// 1. In the buggy build, a == b, !a == b, a == !b and !a == !b all compute
//    plain a == b: sixteen exact per-assignment checks over {0,1}^2.
// ---------------------------------------------------------------------------
void criterion_equivalence_chain() {
  const std::vector<std::string> forms = {"a == b", "!a == b", "a == !b",
                                          "!a == !b"};
  for (uint32_t a = 0; a <= 1; ++a) {
    for (uint32_t b = 0; b <= 1; ++b) {
      bool expect = eval_correct(parse_condition("a == b"), env2(a, b));
      for (const std::string& f : forms) {
        require(eval_buggy(parse_condition(f), env2(a, b)) == expect,
                f + " under a=" + std::to_string(a) + " b=" + std::to_string(b));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 2. !(!a == b) keeps working: correct build computes a == b, buggy build
//    computes a != b.  Eight exact checks over {0,1}^2.
// ---------------------------------------------------------------------------
void criterion_wrapped_negation() {
  CondExpr wrapped = parse_condition("!(!a == b)");
  for (uint32_t a = 0; a <= 1; ++a) {
    for (uint32_t b = 0; b <= 1; ++b) {
      require(eval_correct(wrapped, env2(a, b)) == (a == b),
              "correct a=" + std::to_string(a) + " b=" + std::to_string(b));
      require(eval_buggy(wrapped, env2(a, b)) == (a != b),
              "buggy a=" + std::to_string(a) + " b=" + std::to_string(b));
    }
  }
}

// ---------------------------------------------------------------------------
// 3. The buggy lowerings of the four comparison forms are instruction-for-
//    instruction identical after label normalization.
// ---------------------------------------------------------------------------
void criterion_identical_compilation() {
  const std::vector<std::string> forms = {"eax == ebx", "!eax == ebx",
                                          "eax == !ebx", "!eax == !ebx"};
  LoweredProgram base = normalize_labels(lower(wrap(forms[0]), Mode::Buggy));
  require(!base.instructions.empty(), "baseline lowering is empty");
  for (std::size_t i = 1; i < forms.size(); ++i) {
    LoweredProgram p = normalize_labels(lower(wrap(forms[i]), Mode::Buggy));
    require(p == base, forms[i] + " does not compile identically to " + forms[0]);
  }
}

// ---------------------------------------------------------------------------
// 4. The runas-style backdoor: official table says "admin and pw, with the
//    admin+user combinations unreachable"; effective table grants access to
//    any user with the password.  Synthesis must find a condition within
//    depth 5; difftest must reproduce both tables; lint must catch it.
// ---------------------------------------------------------------------------
void criterion_backdoor_synthesis() {
  constexpr Tristate T = Tristate::True;
  constexpr Tristate F = Tristate::False;
  constexpr Tristate DC = Tristate::DontCare;
  TrapSpec spec;
  spec.official.variables = {"admin", "user", "pw"};
  spec.official.domain = {0, 1};
  spec.official.rows = {F, F, F, F, F, T, DC, DC};
  spec.effective.variables = spec.official.variables;
  spec.effective.domain = spec.official.domain;
  spec.effective.rows = {F, F, F, T, F, T, F, T};

  std::optional<CondExpr> got = synthesize_trap(spec);
  require(got.has_value(), "no condition found");
  require(depth(*got) <= 5, "witness exceeds depth 5: " + pretty_print(*got));

  TruthTable correct_view =
      truth_table(*got, spec.official.variables, spec.official.domain, Mode::Correct);
  TruthTable buggy_view =
      truth_table(*got, spec.official.variables, spec.official.domain, Mode::Buggy);
  for (std::size_t i = 0; i < spec.official.rows.size(); ++i) {
    if (spec.official.rows[i] != DC) {
      require(correct_view.rows[i] == spec.official.rows[i],
              "official row " + std::to_string(i) + " off: " + pretty_print(*got));
    }
    require(buggy_view.rows[i] == spec.effective.rows[i],
            "effective row " + std::to_string(i) + " off: " + pretty_print(*got));
  }

  IfBlock block = wrap(pretty_print(*got));
  DivergenceReport r = difftest(block, spec.official.variables, spec.official.domain);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    require(r.rows[i].buggy ==
                (spec.effective.rows[i] == T ? "then_0" : "else_1"),
            "buggy execution row " + std::to_string(i));
    if (spec.official.rows[i] != DC) {
      require(r.rows[i].ref == (spec.official.rows[i] == T ? "then_0" : "else_1"),
              "reference row " + std::to_string(i));
    }
  }

  std::vector<Diagnostic> findings = lint(block);
  require(!findings.empty(), "lint misses the trap: " + pretty_print(*got));
  require(findings[0].code == "A2154", "unexpected diagnostic code");
}

// ---------------------------------------------------------------------------
// 5. The shipped-fix diagnostic, reproduced exactly: one A2154 for the
//    vulnerable pattern, none for the benign negations.
// ---------------------------------------------------------------------------
void criterion_fix_fidelity() {
  std::vector<Diagnostic> ds =
      lint(parse_block(".if !eax == ebx\n    nop\n.endif\n"));
  require(ds.size() == 1, "expected exactly one finding");
  require(ds[0].code == "A2154", "wrong code");
  require(ds[0].message == "syntax error in control-flow directive", "wrong message");
  require(lint(parse_block(".if !eax\n    nop\n.endif\n")).empty(),
          "negated bare test flagged");
  require(lint(parse_block(".if !(eax == ebx)\n    nop\n.endif\n")).empty(),
          "negated parenthesized condition flagged");
}

// ---------------------------------------------------------------------------
// Shared fuzz corpus for criteria 6-8: 1,000 conditions, at most 3 variables,
// depth at most 4, wrapped as if/else blocks.
// ---------------------------------------------------------------------------
const std::vector<IfBlock>& corpus() {
  static const std::vector<IfBlock> blocks = [] {
    std::vector<IfBlock> out;
    std::mt19937_64 rng(20260817u);
    int attempts = 0;
    while (out.size() < 1000 && ++attempts < 100000) {
      CondExpr c = fuzz::gen_cond(rng, 7, fuzz::operand_pool(out.size()));
      if (depth(c) > 4 || collect_variables(c).size() > 3) continue;
      out.push_back(fuzz::wrap_block(c));
    }
    return out;
  }();
  return blocks;
}

void for_each_wide_env(const std::vector<std::string>& vars,
                       const std::function<void(const Environment&)>& fn) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < vars.size(); ++i) total *= kWideDomain.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    Environment env;
    std::size_t t = idx;
    for (std::size_t v = vars.size(); v-- > 0;) {
      env[vars[v]] = kWideDomain[t % kWideDomain.size()];
      t /= kWideDomain.size();
    }
    fn(env);
  }
}

// ---------------------------------------------------------------------------
// 6. Machine executions agree with the evaluators on every (condition,
//    assignment) pair over the wide domain, in both modes.
// ---------------------------------------------------------------------------
void criterion_evaluator_equivalence() {
  require(corpus().size() == 1000, "corpus generation fell short");
  std::size_t pairs = 0;
  for (const IfBlock& b : corpus()) {
    std::vector<std::string> vars = collect_variables(b);
    LoweredProgram correct = lower(b, Mode::Correct);
    LoweredProgram buggy = lower(b, Mode::Buggy);
    for_each_wide_env(vars, [&](const Environment& env) {
      ++pairs;
      ExecutionResult rc = execute(correct, env);
      require(rc.marks.size() == 1, "correct run must reach exactly one mark");
      require(rc.marks[0] == choose_block(b, env, Mode::Correct),
              "correct-mode mismatch on " + pretty_print(b.cond));
      ExecutionResult rb = execute(buggy, env);
      require(rb.marks.size() == 1, "buggy run must reach exactly one mark");
      require(rb.marks[0] == choose_block(b, env, Mode::Buggy),
              "buggy-mode mismatch on " + pretty_print(b.cond));
    });
  }
  require(pairs >= 1000, "no assignments enumerated");
}

// ---------------------------------------------------------------------------
// 7. esp equals its entry value at every MARK and at HALT, on every
//    execution in the corpus, in both modes.
// ---------------------------------------------------------------------------
void criterion_stack_balance() {
  const uint32_t entry = MachineConfig{}.entry_esp();
  for (const IfBlock& b : corpus()) {
    std::vector<std::string> vars = collect_variables(b);
    for (Mode mode : {Mode::Correct, Mode::Buggy}) {
      LoweredProgram p = lower(b, mode);
      for_each_wide_env(vars, [&](const Environment& env) {
        ExecutionResult r = execute(p, env);
        for (uint32_t esp_at_mark : r.mark_esps) {
          require(esp_at_mark == entry,
                  "esp off balance at mark in " + pretty_print(b.cond));
        }
        require(r.final_state.esp() == entry,
                "esp off balance at halt in " + pretty_print(b.cond));
      });
    }
  }
}

// ---------------------------------------------------------------------------
// 8. Every condition in the corpus with at least one divergent row over
//    {0,1}^n carries at least one A2154 finding.
// ---------------------------------------------------------------------------
void criterion_lint_soundness() {
  std::size_t divergent_conditions = 0;
  for (const IfBlock& b : corpus()) {
    DivergenceReport r = difftest(b, collect_variables(b), {0, 1});
    if (r.divergent_count() == 0) continue;
    ++divergent_conditions;
    require(!lint(b).empty(),
            "divergent but unflagged: " + pretty_print(b.cond));
  }
  require(divergent_conditions > 0, "corpus exercised no divergence");
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  void (*fn)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "buggy builds conflate the negated comparison family", 1.0,
       criterion_equivalence_chain},
      {2, "negating a parenthesized comparison still works", 1.0,
       criterion_wrapped_negation},
      {3, "the four comparison forms compile identically when buggy", 1.0,
       criterion_identical_compilation},
      {4, "a reviewable backdoor is synthesizable within depth 5", 10.0,
       criterion_backdoor_synthesis},
      {5, "the linter reproduces the shipped fix exactly", 1.0,
       criterion_fix_fidelity},
      {6, "machine executions match the evaluators on 1000 conditions", 60.0,
       criterion_evaluator_equivalence},
      {7, "the stack balances at every mark and halt", 60.0,
       criterion_stack_balance},
      {8, "every divergent condition is flagged", 60.0,
       criterion_lint_soundness},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    try {
      c.fn();
    } catch (const CheckFailure& f) {
      detail = f.detail;
    } catch (const std::exception& e) {
      detail = e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (detail.empty() && elapsed > c.limit_seconds) {
      detail = "exceeded the " + std::to_string(c.limit_seconds) + "s budget";
    }
    if (detail.empty()) {
      std::printf("[PASS] %d. %s (%.2fs)\n", c.id, c.name, elapsed);
    } else {
      std::printf("[FAIL] %d. %s (%.2fs) — %s\n", c.id, c.name, elapsed,
                  detail.c_str());
      ++failures;
    }
  }
  return failures;
}
