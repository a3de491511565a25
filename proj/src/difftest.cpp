// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "condtrap/analysis.hpp"
#include "condtrap/lowering.hpp"
#include "condtrap/machine.hpp"
#include "condtrap/pretty.hpp"

namespace condtrap {

namespace {

// A block outcome is 0/1-encodable only for plain if/else blocks; chains
// report block ids directly.
nlohmann::ordered_json outcome_json(const DivergenceReport& report,
                                    const std::string& id) {
  if (!report.simple) return id;
  return id.rfind("then", 0) == 0 ? 1 : 0;
}

// The single mark hit during execution names the chosen block; no mark at
// all means every test failed and control fell through to the end.
std::string executed_block(const Machine& machine, const Environment& env) {
  ExecutionResult result = machine.run(env);
  if (result.marks.empty()) return "-";
  if (result.marks.size() == 1) return result.marks.front();
  throw ToolchainMismatch(fmt::format(
      "execution visited {} marks; a block run must visit at most one",
      result.marks.size()));
}

}  // namespace

std::string choose_block(const IfBlock& block, const Environment& env,
                         Mode mode) {
  if (eval(block.cond, env, mode)) return block.then_body.id;
  for (const auto& [cond, body] : block.elseifs)
    if (eval(cond, env, mode)) return body.id;
  return block.else_body ? block.else_body->id : "-";
}

DivergenceReport difftest(const IfBlock& block,
                          const std::vector<std::string>& variables,
                          const std::vector<uint32_t>& domain,
                          MachineConfig machine_config, std::size_t row_cap) {
  DivergenceReport report;
  report.condition = pretty_print(block.cond);
  for (const auto& [cond, body] : block.elseifs)
    report.elseif_conditions.push_back(pretty_print(cond));
  report.variables = variables;
  report.domain = domain;
  report.simple = block.elseifs.empty();

  std::size_t rows = 1;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (domain.empty()) {
      rows = 0;
      break;
    }
    if (rows > row_cap / domain.size())
      throw DomainTooLarge(
          fmt::format("{} variables over {} values exceed the row cap of {}",
                      variables.size(), domain.size(), row_cap));
    rows *= domain.size();
  }

  // Lower each mode once and replay the same program across all rows.
  Machine correct_machine(lower(block, Mode::Correct), machine_config);
  Machine buggy_machine(lower(block, Mode::Buggy), machine_config);

  TruthTable indexer;
  indexer.variables = variables;
  indexer.domain = domain;

  report.rows.reserve(rows);
  for (std::size_t idx = 0; idx < rows; ++idx) {
    DivergenceRow row;
    row.assign = indexer.assignment_of(idx);
    Environment env;
    for (std::size_t i = 0; i < variables.size(); ++i)
      env[variables[i]] = row.assign[i];

    row.ref = choose_block(block, env, Mode::Correct);
    row.correct = executed_block(correct_machine, env);
    row.buggy = executed_block(buggy_machine, env);

    if (row.correct != row.ref)
      throw ToolchainMismatch(fmt::format(
          "correct-mode execution chose '{}' where the evaluator chose '{}'",
          row.correct, row.ref));
    if (const std::string buggy_ref = choose_block(block, env, Mode::Buggy);
        row.buggy != buggy_ref)
      throw ToolchainMismatch(fmt::format(
          "buggy-mode execution chose '{}' where the evaluator chose '{}'",
          row.buggy, buggy_ref));

    if (row.buggy != row.ref) report.divergent.push_back(idx);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string divergence_report_to_json(const DivergenceReport& report,
                                      bool pretty) {
  nlohmann::ordered_json j;
  j["condition"] = report.condition;
  if (!report.elseif_conditions.empty())
    j["elseif_conditions"] = report.elseif_conditions;
  j["variables"] = report.variables;
  j["domain"] = report.domain;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const DivergenceRow& row : report.rows) {
    nlohmann::ordered_json r;
    r["assign"] = row.assign;
    r["ref"] = outcome_json(report, row.ref);
    r["correct"] = outcome_json(report, row.correct);
    r["buggy"] = outcome_json(report, row.buggy);
    r["divergent"] = row.buggy != row.ref;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["divergent_count"] = report.divergent_count();
  return pretty ? j.dump(2) : j.dump();
}

std::string divergence_report_to_text(const DivergenceReport& report) {
  std::string out = "condition: " + report.condition + "\n";
  for (const std::string& cond : report.elseif_conditions)
    out += "elseif: " + cond + "\n";
  for (const DivergenceRow& row : report.rows) {
    std::string assign_text;
    for (std::size_t i = 0; i < report.variables.size(); ++i) {
      if (i > 0) assign_text += ' ';
      assign_text +=
          fmt::format("{}={}", report.variables[i], row.assign[i]);
    }
    out += fmt::format("{} | ref={} correct={} buggy={}", assign_text,
                       row.ref, row.correct, row.buggy);
    if (row.buggy != row.ref) out += " DIVERGE";
    out += "\n";
  }
  out += fmt::format("divergent rows: {} of {}\n", report.divergent_count(),
                     report.rows.size());
  return out;
}

}  // namespace condtrap
