// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// Bounded bottom-up enumeration for trap synthesis.
//
// Candidates are generated in node-count order; within one node count the
// generation order is bare tests, comparisons, `!(...)`, `&&`, `||`.  Truth
// tables (one bit per assignment row, so at most 64 rows) are computed for
// both pipelines as candidates are built; composites derive their tables
// from their children's without re-evaluation.  Only one representative per
// (correct-table, buggy-table) pair seeds larger compositions — two
// conditions with identical tables in both modes are interchangeable inside
// any composition — but EVERY generated candidate is tested against the
// target, and the lexicographically least pretty-printed match of the
// smallest node count wins.

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fmt/format.h>

#include "condtrap/analysis.hpp"
#include "condtrap/pretty.hpp"

namespace condtrap {

namespace {

struct Candidate {
  CondExpr expr;
  uint64_t correct_mask = 0;
  uint64_t buggy_mask = 0;
  int depth = 0;
};

struct Masks {
  uint64_t correct = 0;
  uint64_t buggy = 0;
};

class Synthesizer {
 public:
  explicit Synthesizer(const TrapSpec& spec) : spec_(spec) {
    if (spec.official.variables != spec.effective.variables ||
        spec.official.domain != spec.effective.domain)
      throw std::invalid_argument(
          "official and effective tables must share variables and domain");

    // One bit per row keeps each table in a single word.
    std::size_t expected = 1;
    for (std::size_t i = 0; i < spec.official.variables.size(); ++i) {
      if (spec.official.domain.empty()) {
        expected = 0;
        break;
      }
      if (expected > 64 / spec.official.domain.size())
        throw DomainTooLarge(fmt::format(
            "{} variables over {} values exceed the 64-row synthesis limit",
            spec.official.variables.size(), spec.official.domain.size()));
      expected *= spec.official.domain.size();
    }
    if (spec.official.rows.size() != expected ||
        spec.effective.rows.size() != expected)
      throw std::invalid_argument(fmt::format(
          "expected {} rows per table, got {} official and {} effective",
          expected, spec.official.rows.size(), spec.effective.rows.size()));

    rows_ = expected;
    row_mask_ = rows_ == 64 ? ~uint64_t{0} : (uint64_t{1} << rows_) - 1;

    for (std::size_t i = 0; i < rows_; ++i) {
      if (spec.official.rows[i] != Tristate::DontCare) {
        official_care_ |= bit(i);
        if (spec.official.rows[i] == Tristate::True) official_want_ |= bit(i);
      }
      if (spec.effective.rows[i] != Tristate::DontCare) {
        effective_care_ |= bit(i);
        if (spec.effective.rows[i] == Tristate::True)
          effective_want_ |= bit(i);
      }
    }

    envs_.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      std::vector<uint32_t> assign = spec.official.assignment_of(i);
      Environment env;
      for (std::size_t v = 0; v < spec.official.variables.size(); ++v)
        env[spec.official.variables[v]] = assign[v];
      envs_.push_back(std::move(env));
    }

    // Operand pool: table variables first, then the extra immediates.
    for (const std::string& name : spec.official.variables)
      pool_.push_back(Operand::named(name));
    for (uint32_t imm : spec.immediates) pool_.push_back(Operand::imm(imm));
  }

  std::optional<CondExpr> run() {
    // A tree of depth D holds at most 2^D - 1 counted nodes, so sizes past
    // that bound cannot satisfy the depth limit and the search is finite.
    const int max_size =
        spec_.depth_limit >= 1 ? (1 << spec_.depth_limit) - 1 : 0;
    reps_.resize(static_cast<std::size_t>(max_size) + 1);
    for (int size = 1; size <= max_size; ++size) {
      generate_size(size);
      if (best_) return std::move(best_->expr);
    }
    return std::nullopt;
  }

 private:
  static uint64_t bit(std::size_t row) { return uint64_t{1} << row; }

  void generate_size(int size) {
    // Bare tests: a run of size-1 bangs on one operand.
    const int bare_bangs = size - 1;
    if (1 + bare_bangs <= spec_.depth_limit) {
      for (const Operand& op : pool_) admit(make_bare(op, bare_bangs), size);
    }

    // Comparisons: size-1 bangs split across the two sides.
    for (int left_bangs = 0; left_bangs <= size - 1; ++left_bangs) {
      const int right_bangs = size - 1 - left_bangs;
      if (left_bangs > spec_.max_negations_per_side ||
          right_bangs > spec_.max_negations_per_side)
        continue;
      if (2 + std::max(left_bangs, right_bangs) > spec_.depth_limit) continue;
      for (const Operand& lhs : pool_) {
        for (const Operand& rhs : pool_) {
          for (RelOp op : {RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le,
                           RelOp::Gt, RelOp::Ge}) {
            admit(make_rel(op, make_notop(lhs, left_bangs),
                           make_notop(rhs, right_bangs)),
                  size);
          }
        }
      }
    }

    // `!(...)` around a smaller representative.
    if (size >= 2) {
      for (const Candidate& rep : reps_[static_cast<std::size_t>(size - 1)]) {
        const int depth = 1 + rep.depth;
        if (depth > spec_.depth_limit) continue;
        admit(make_not(make_paren(clone(rep.expr))), size,
              Masks{~rep.correct_mask & row_mask_,
                    ~rep.buggy_mask & row_mask_},
              depth);
      }
    }

    // Connectives over pairs of smaller representatives.
    for (int left_size = 1; left_size <= size - 2; ++left_size) {
      const int right_size = size - 1 - left_size;
      for (const Candidate& l : reps_[static_cast<std::size_t>(left_size)]) {
        for (const Candidate& r :
             reps_[static_cast<std::size_t>(right_size)]) {
          const int depth = 1 + std::max(l.depth, r.depth);
          if (depth > spec_.depth_limit) continue;
          admit(make_and(and_operand(l.expr), and_operand(r.expr)), size,
                Masks{l.correct_mask & r.correct_mask,
                      l.buggy_mask & r.buggy_mask},
                depth);
          admit(make_or(clone(l.expr), clone(r.expr)), size,
                Masks{l.correct_mask | r.correct_mask,
                      l.buggy_mask | r.buggy_mask},
                depth);
        }
      }
    }
  }

  // An `||` child of an `&&` must keep its parentheses or the printed text
  // would reparse with the wrong shape; everything else nests untouched.
  static CondExpr and_operand(const CondExpr& e) {
    CondExpr copy = clone(e);
    if (std::holds_alternative<OrExpr>(copy.node))
      return make_paren(std::move(copy));
    return copy;
  }

  Masks evaluate(const CondExpr& e) const {
    Masks m;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (eval_correct(e, envs_[i])) m.correct |= bit(i);
      if (eval_buggy(e, envs_[i])) m.buggy |= bit(i);
    }
    return m;
  }

  // Every depth-admissible construction counts against the budget, whether
  // it matches, seeds compositions, or is discarded as a duplicate.
  void admit(CondExpr expr, int size,
             std::optional<Masks> masks = std::nullopt, int cached_depth = 0) {
    if (++constructed_ > spec_.candidate_budget)
      throw SearchSpaceExceeded(fmt::format("candidate budget of {} exceeded",
                                            spec_.candidate_budget));
    Masks m = masks ? *masks : evaluate(expr);
    const int d = masks ? cached_depth : depth(expr);

    if ((m.correct & official_care_) == official_want_ &&
        (m.buggy & effective_care_) == effective_want_) {
      std::string text = pretty_print(expr);
      if (!best_ || text < best_text_) {
        best_ = Candidate{std::move(expr), m.correct, m.buggy, d};
        best_text_ = std::move(text);
      }
      return;
    }
    if (seen_.insert({m.correct, m.buggy}).second)
      reps_[static_cast<std::size_t>(size)].push_back(
          Candidate{std::move(expr), m.correct, m.buggy, d});
  }

  const TrapSpec& spec_;
  std::size_t rows_ = 0;
  uint64_t row_mask_ = 0;
  uint64_t official_care_ = 0;
  uint64_t official_want_ = 0;
  uint64_t effective_care_ = 0;
  uint64_t effective_want_ = 0;
  std::vector<Environment> envs_;
  std::vector<Operand> pool_;
  std::vector<std::vector<Candidate>> reps_;  // indexed by node count
  std::set<std::pair<uint64_t, uint64_t>> seen_;
  uint64_t constructed_ = 0;
  std::optional<Candidate> best_;
  std::string best_text_;
};

}  // namespace

std::optional<CondExpr> synthesize_trap(const TrapSpec& spec) {
  return Synthesizer(spec).run();
}

}  // namespace condtrap
