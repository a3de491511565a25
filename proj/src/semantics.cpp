// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "condtrap/semantics.hpp"

#include <algorithm>
#include <variant>

#include <fmt/format.h>
#include <json.hpp>

namespace condtrap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// One value-level negation per written bang: !x is 1 when x == 0, else 0.
uint32_t apply_bangs(uint32_t value, int negations) {
  for (int i = 0; i < negations; ++i) value = value == 0 ? 1u : 0u;
  return value;
}

bool rel_holds(RelOp op, uint32_t a, uint32_t b) {
  switch (op) {
    case RelOp::Eq: return a == b;
    case RelOp::Ne: return a != b;
    case RelOp::Lt: return a < b;
    case RelOp::Le: return a <= b;
    case RelOp::Gt: return a > b;
    case RelOp::Ge: return a >= b;
  }
  return false;
}

bool eval_impl(const CondExpr& e, const Environment& env, Mode mode) {
  return std::visit(
      overloaded{
          [&](const BareTest& b) {
            return apply_bangs(operand_value(b.test.operand, env),
                               b.test.negations) != 0;
          },
          [&](const RelTest& r) {
            uint32_t lhs = operand_value(r.lhs.operand, env);
            uint32_t rhs = operand_value(r.rhs.operand, env);
            if (mode == Mode::Correct) {
              lhs = apply_bangs(lhs, r.lhs.negations);
              rhs = apply_bangs(rhs, r.rhs.negations);
            }
            return rel_holds(r.op, lhs, rhs);
          },
          [&](const NotExpr& n) { return !eval_impl(*n.inner, env, mode); },
          [&](const AndExpr& a) {
            const bool lhs = eval_impl(*a.lhs, env, mode);
            const bool rhs = eval_impl(*a.rhs, env, mode);
            return lhs && rhs;
          },
          [&](const OrExpr& o) {
            const bool lhs = eval_impl(*o.lhs, env, mode);
            const bool rhs = eval_impl(*o.rhs, env, mode);
            return lhs || rhs;
          },
          [&](const ParenExpr& p) { return eval_impl(*p.inner, env, mode); },
      },
      e.node);
}

}  // namespace

uint32_t operand_value(const Operand& op, const Environment& env) {
  if (op.kind == OperandKind::Immediate) return op.value;
  auto it = env.find(op.name);
  if (it == env.end()) throw UnboundOperand(op.name);
  return it->second;
}

bool eval_correct(const CondExpr& e, const Environment& env) {
  return eval_impl(e, env, Mode::Correct);
}

bool eval_buggy(const CondExpr& e, const Environment& env) {
  return eval_impl(e, env, Mode::Buggy);
}

bool eval(const CondExpr& e, const Environment& env, Mode mode) {
  return eval_impl(e, env, mode);
}

std::vector<uint32_t> TruthTable::assignment_of(std::size_t index) const {
  std::vector<uint32_t> assign(variables.size());
  const std::size_t d = domain.size();
  for (std::size_t i = variables.size(); i-- > 0;) {
    assign[i] = domain[index % d];
    index /= d;
  }
  return assign;
}

std::size_t TruthTable::index_of(const std::vector<uint32_t>& assignment) const {
  if (assignment.size() != variables.size()) {
    throw Error(fmt::format("assignment has {} values for {} variables",
                            assignment.size(), variables.size()));
  }
  std::size_t index = 0;
  for (uint32_t value : assignment) {
    auto it = std::find(domain.begin(), domain.end(), value);
    if (it == domain.end()) {
      throw Error(fmt::format("assignment value {} is not in the domain", value));
    }
    index = index * domain.size() +
            static_cast<std::size_t>(it - domain.begin());
  }
  return index;
}

namespace {

std::size_t checked_row_count(std::size_t variables, std::size_t domain_size,
                              std::size_t row_cap) {
  std::size_t rows = 1;
  for (std::size_t i = 0; i < variables; ++i) {
    if (domain_size == 0) return 0;
    if (rows > row_cap / domain_size) {
      throw DomainTooLarge(
          fmt::format("{} variables over {} domain values exceed the row cap of {}",
                      variables, domain_size, row_cap));
    }
    rows *= domain_size;
  }
  return rows;
}

}  // namespace

TruthTable truth_table(const CondExpr& e, const std::vector<std::string>& variables,
                       const std::vector<uint32_t>& domain, Mode mode,
                       std::size_t row_cap) {
  TruthTable t;
  t.variables = variables;
  t.domain = domain;
  const std::size_t rows = checked_row_count(variables.size(), domain.size(), row_cap);
  t.rows.resize(rows);
  Environment env;
  for (std::size_t idx = 0; idx < rows; ++idx) {
    const std::vector<uint32_t> assign = t.assignment_of(idx);
    env.clear();
    for (std::size_t i = 0; i < variables.size(); ++i) env[variables[i]] = assign[i];
    t.rows[idx] = eval(e, env, mode) ? Tristate::True : Tristate::False;
  }
  return t;
}

std::string truth_table_to_json(const TruthTable& table, bool pretty) {
  nlohmann::ordered_json j;
  j["variables"] = table.variables;
  j["domain"] = table.domain;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t idx = 0; idx < table.row_count(); ++idx) {
    nlohmann::ordered_json row;
    row["assign"] = table.assignment_of(idx);
    switch (table.rows[idx]) {
      case Tristate::False: row["out"] = 0; break;
      case Tristate::True: row["out"] = 1; break;
      case Tristate::DontCare: row["out"] = "dc"; break;
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return pretty ? j.dump(2) : j.dump();
}

TruthTable truth_table_from_json(const std::string& text) {
  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(text);
  TruthTable t;
  t.variables = j.at("variables").get<std::vector<std::string>>();
  t.domain = j.at("domain").get<std::vector<uint32_t>>();
  const std::size_t expected =
      checked_row_count(t.variables.size(), t.domain.size(), kDefaultRowCap);
  const auto& rows = j.at("rows");
  if (!rows.is_array() || rows.size() != expected) {
    throw Error(fmt::format("expected {} rows covering every assignment, got {}",
                            expected, rows.size()));
  }
  t.rows.assign(expected, Tristate::False);
  std::vector<bool> seen(expected, false);
  for (const auto& row : rows) {
    const auto assign = row.at("assign").get<std::vector<uint32_t>>();
    const std::size_t idx = t.index_of(assign);
    if (seen[idx]) {
      throw Error(fmt::format("duplicate row for assignment index {}", idx));
    }
    seen[idx] = true;
    const auto& out = row.at("out");
    if (out.is_string()) {
      if (out.get<std::string>() != "dc") {
        throw Error("row 'out' must be 0, 1, or \"dc\"");
      }
      t.rows[idx] = Tristate::DontCare;
    } else {
      const int value = out.get<int>();
      if (value != 0 && value != 1) {
        throw Error("row 'out' must be 0, 1, or \"dc\"");
      }
      t.rows[idx] = value == 1 ? Tristate::True : Tristate::False;
    }
  }
  return t;
}

std::string truth_table_to_text(const TruthTable& table) {
  std::size_t value_width = 1;
  for (uint32_t v : table.domain) {
    value_width = std::max(value_width, std::to_string(v).size());
  }
  std::vector<std::size_t> widths(table.variables.size());
  std::string out;
  for (std::size_t i = 0; i < table.variables.size(); ++i) {
    widths[i] = std::max(table.variables[i].size(), value_width);
    if (i > 0) out += ' ';
    out += fmt::format("{:>{}}", table.variables[i], widths[i]);
  }
  out += " | out\n";
  for (std::size_t idx = 0; idx < table.row_count(); ++idx) {
    const std::vector<uint32_t> assign = table.assignment_of(idx);
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (i > 0) out += ' ';
      out += fmt::format("{:>{}}", assign[i], widths[i]);
    }
    out += " | ";
    switch (table.rows[idx]) {
      case Tristate::False: out += '0'; break;
      case Tristate::True: out += '1'; break;
      case Tristate::DontCare: out += "dc"; break;
    }
    out += '\n';
  }
  return out;
}

}  // namespace condtrap
