// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// The `condtrap` command-line tool.  Exit codes are part of the contract:
//   0  success / no findings
//   1  findings (lint diagnostics, divergent rows, synthesis not found)
//   2  usage or parse errors (bad flags, malformed condition, bad inputs)
//   3  internal invariant violations (toolchain mismatch, machine traps)

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "condtrap/analysis.hpp"
#include "condtrap/ast.hpp"
#include "condtrap/cli.hpp"
#include "condtrap/errors.hpp"
#include "condtrap/ir.hpp"
#include "condtrap/lowering.hpp"
#include "condtrap/machine.hpp"
#include "condtrap/parser.hpp"
#include "condtrap/pretty.hpp"
#include "condtrap/semantics.hpp"

namespace condtrap {

namespace {

// `--cond C` wraps C into this block; the 4-character ".if " prefix is
// subtracted from line-1 columns so messages point into C itself.
constexpr int kCondPrefixWidth = 4;
constexpr const char* kCondPlaceholder = "<cond>";

struct InputOpts {
  std::string file;
  std::string cond;
  std::string mode = "correct";
  std::string format = "text";
};

struct BlockInput {
  IfBlock block;
  std::string file;  // path, or "<cond>" for inline conditions
  bool from_cond = false;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot open '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

BlockInput load_block(const InputOpts& opts) {
  const bool has_file = !opts.file.empty();
  const bool has_cond = !opts.cond.empty();
  if (has_file && has_cond)
    throw Error("give either an input FILE or --cond, not both");
  if (!has_file && !has_cond)
    throw Error("an input FILE or --cond is required");

  BlockInput in;
  if (has_cond) {
    const std::string source =
        fmt::format(".if {}\n    nop\n.else\n    nop\n.endif\n", opts.cond);
    try {
      in.block = parse_block(source);
    } catch (const ParseError& e) {
      if (e.line == 1 && e.col > kCondPrefixWidth)
        throw ParseError(1, e.col - kCondPrefixWidth, e.what());
      throw;
    }
    in.file = kCondPlaceholder;
    in.from_cond = true;
  } else {
    in.block = parse_block(slurp(opts.file));
    in.file = opts.file;
  }
  return in;
}

Mode require_mode(const std::string& text) {
  if (text == "correct") return Mode::Correct;
  if (text == "buggy") return Mode::Buggy;
  throw Error(fmt::format("invalid mode '{}'; expected correct or buggy", text));
}

// Returns true for json output.
bool require_format(const std::string& text) {
  if (text == "text") return false;
  if (text == "json") return true;
  throw Error(fmt::format("invalid format '{}'; expected text or json", text));
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find(',', start);
    std::string piece = text.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    if (!piece.empty()) parts.push_back(std::move(piece));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return parts;
}

uint32_t parse_value(const std::string& text) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos, 0);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || value > 0xFFFFFFFFull)
    throw Error(fmt::format("invalid value '{}'; expected a 32-bit number", text));
  return static_cast<uint32_t>(value);
}

Environment parse_env(const std::vector<std::string>& args) {
  Environment env;
  for (const std::string& arg : args) {
    for (const std::string& binding : split_commas(arg)) {
      const std::size_t eq = binding.find('=');
      if (eq == std::string::npos || eq == 0)
        throw Error(fmt::format("invalid --env binding '{}'; expected name=value",
                                binding));
      env[binding.substr(0, eq)] = parse_value(binding.substr(eq + 1));
    }
  }
  return env;
}

MachineConfig machine_config_from_env() {
  MachineConfig config;
  if (const char* limit = std::getenv("CONDTRAP_STEP_LIMIT")) {
    std::size_t pos = 0;
    unsigned long long value = 0;
    const std::string text = limit;
    try {
      value = std::stoull(text, &pos, 0);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != text.size())
      throw Error(fmt::format("invalid CONDTRAP_STEP_LIMIT '{}'", text));
    config.step_limit = value;
  }
  return config;
}

std::vector<std::string> block_variables(const BlockInput& in,
                                         const std::string& vars_arg,
                                         bool cond_only) {
  if (!vars_arg.empty()) return split_commas(vars_arg);
  return cond_only ? collect_variables(in.block.cond)
                   : collect_variables(in.block);
}

std::vector<uint32_t> pick_domain(bool wide) {
  return wide ? kWideDomain : std::vector<uint32_t>{0, 1};
}

int do_lower(const InputOpts& opts, bool normalize, std::ostream& out) {
  const BlockInput in = load_block(opts);
  const Mode mode = require_mode(opts.mode);
  const bool json = require_format(opts.format);
  LoweredProgram program = lower(in.block, mode);
  if (normalize) program = normalize_labels(program);
  if (json)
    out << program_json(program, /*pretty=*/false) << "\n";
  else
    out << program_text(program);
  return 0;
}

int do_run(const InputOpts& opts, const std::vector<std::string>& env_args,
           bool trace, std::ostream& out) {
  const BlockInput in = load_block(opts);
  const Mode mode = require_mode(opts.mode);
  const bool json = require_format(opts.format);
  const Environment env = parse_env(env_args);

  Machine machine(lower(in.block, mode), machine_config_from_env());
  TraceSink sink;
  if (trace && !json)
    sink = [&out](const TraceEntry& entry) { out << trace_line(entry) << "\n"; };
  const ExecutionResult result = machine.run(env, sink);

  if (json) {
    nlohmann::ordered_json j;
    j["marks"] = result.marks;
    j["steps"] = result.steps;
    out << j.dump() << "\n";
  } else {
    std::string marks;
    for (const std::string& mark : result.marks) {
      if (!marks.empty()) marks += ' ';
      marks += mark;
    }
    out << "marks: " << (marks.empty() ? "-" : marks) << "\n";
  }
  return 0;
}

int do_lint(const InputOpts& opts, std::ostream& out) {
  const BlockInput in = load_block(opts);
  const bool json = require_format(opts.format);
  std::vector<Diagnostic> diagnostics = lint(in.block);
  if (in.from_cond)
    for (Diagnostic& d : diagnostics)
      if (d.span.line == 1) d.span.col -= kCondPrefixWidth;

  if (json) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const Diagnostic& d : diagnostics) {
      nlohmann::ordered_json row;
      row["file"] = in.file;
      row["line"] = d.span.line;
      row["col"] = d.span.col;
      row["severity"] = d.severity;
      row["code"] = d.code;
      row["message"] = d.message;
      rows.push_back(std::move(row));
    }
    out << rows.dump() << "\n";
  } else {
    for (const Diagnostic& d : diagnostics)
      out << diagnostic_text(d, in.file) << "\n";
  }
  return diagnostics.empty() ? 0 : 1;
}

int do_difftest(const InputOpts& opts, const std::string& vars_arg, bool wide,
                std::ostream& out) {
  const BlockInput in = load_block(opts);
  const bool json = require_format(opts.format);
  const std::vector<std::string> variables =
      block_variables(in, vars_arg, /*cond_only=*/false);
  const DivergenceReport report =
      difftest(in.block, variables, pick_domain(wide), machine_config_from_env());
  if (json)
    out << divergence_report_to_json(report, /*pretty=*/false) << "\n";
  else
    out << divergence_report_to_text(report);
  return report.divergent_count() > 0 ? 1 : 0;
}

int do_truthtable(const InputOpts& opts, const std::string& vars_arg, bool wide,
                  std::ostream& out) {
  const BlockInput in = load_block(opts);
  const Mode mode = require_mode(opts.mode);
  const bool json = require_format(opts.format);
  const std::vector<std::string> variables =
      block_variables(in, vars_arg, /*cond_only=*/true);
  const TruthTable table =
      truth_table(in.block.cond, variables, pick_domain(wide), mode);
  if (json)
    out << truth_table_to_json(table, /*pretty=*/false) << "\n";
  else
    out << truth_table_to_text(table);
  return 0;
}

int do_synth(const std::string& official_path, const std::string& effective_path,
             int depth_limit, uint64_t budget, const std::string& format,
             std::ostream& out, std::ostream& err) {
  const bool json = require_format(format);
  TrapSpec spec;
  spec.official = truth_table_from_json(slurp(official_path));
  spec.effective = truth_table_from_json(slurp(effective_path));
  spec.depth_limit = depth_limit;
  spec.candidate_budget = budget;

  const std::optional<CondExpr> found = synthesize_trap(spec);
  if (!found) {
    err << fmt::format("no condition within depth {} matches the tables\n",
                       spec.depth_limit);
    return 1;
  }
  if (json) {
    nlohmann::ordered_json j;
    j["condition"] = pretty_print(*found);
    j["node_count"] = node_count(*found);
    j["depth"] = depth(*found);
    out << j.dump() << "\n";
  } else {
    out << pretty_print(*found) << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "MASM-style .if condition toolchain: reproduce, detect, and study the\n"
      "ml boolean-negation miscompilation (CVE-2018-8232)",
      "condtrap"};
  app.require_subcommand(1);

  InputOpts lower_opts;
  bool lower_normalize = false;
  CLI::App* lower_cmd =
      app.add_subcommand("lower", "compile a block to a branch program");
  lower_cmd->add_option("file", lower_opts.file, "block source file");
  lower_cmd->add_option("--cond", lower_opts.cond,
                        "inline condition, wrapped in an if/else block");
  lower_cmd->add_option("--mode", lower_opts.mode, "correct|buggy");
  lower_cmd->add_option("--format", lower_opts.format, "text|json");
  lower_cmd->add_flag("--normalize", lower_normalize,
                      "rename labels in definition order");

  InputOpts run_opts;
  std::vector<std::string> run_env;
  bool run_trace = false;
  CLI::App* run_cmd =
      app.add_subcommand("run", "execute a lowered block on the machine");
  run_cmd->add_option("file", run_opts.file, "block source file");
  run_cmd->add_option("--cond", run_opts.cond,
                      "inline condition, wrapped in an if/else block");
  run_cmd->add_option("--mode", run_opts.mode, "correct|buggy");
  run_cmd->add_option("--format", run_opts.format, "text|json");
  run_cmd->add_option("--env", run_env,
                      "name=value bindings, repeatable or comma-separated");
  run_cmd->add_flag("--trace", run_trace, "print one line per executed step");

  InputOpts lint_opts;
  CLI::App* lint_cmd =
      app.add_subcommand("lint", "flag negations the buggy build mis-assembles");
  lint_cmd->add_option("file", lint_opts.file, "block source file");
  lint_cmd->add_option("--cond", lint_opts.cond,
                       "inline condition, wrapped in an if/else block");
  lint_cmd->add_option("--format", lint_opts.format, "text|json");

  InputOpts difftest_opts;
  std::string difftest_vars;
  bool difftest_wide = false;
  CLI::App* difftest_cmd = app.add_subcommand(
      "difftest", "compare correct and buggy builds over all assignments");
  difftest_cmd->add_option("file", difftest_opts.file, "block source file");
  difftest_cmd->add_option("--cond", difftest_opts.cond,
                           "inline condition, wrapped in an if/else block");
  difftest_cmd->add_option("--format", difftest_opts.format, "text|json");
  difftest_cmd->add_option("--vars", difftest_vars,
                           "comma-separated variable order");
  difftest_cmd->add_flag("--wide", difftest_wide,
                         "use the {0,1,2,0xffffffff} domain");

  InputOpts tt_opts;
  std::string tt_vars;
  bool tt_wide = false;
  CLI::App* tt_cmd =
      app.add_subcommand("truthtable", "enumerate a condition over a domain");
  tt_cmd->add_option("file", tt_opts.file, "block source file");
  tt_cmd->add_option("--cond", tt_opts.cond,
                     "inline condition, wrapped in an if/else block");
  tt_cmd->add_option("--mode", tt_opts.mode, "correct|buggy");
  tt_cmd->add_option("--format", tt_opts.format, "text|json");
  tt_cmd->add_option("--vars", tt_vars, "comma-separated variable order");
  tt_cmd->add_flag("--wide", tt_wide, "use the {0,1,2,0xffffffff} domain");

  std::string synth_official;
  std::string synth_effective;
  std::string synth_format = "text";
  int synth_depth = TrapSpec{}.depth_limit;
  uint64_t synth_budget = TrapSpec{}.candidate_budget;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "find a condition matching official and effective tables");
  synth_cmd->add_option("--official", synth_official,
                        "truth table JSON the source should suggest")
      ->required();
  synth_cmd->add_option("--effective", synth_effective,
                        "truth table JSON the buggy build should realize")
      ->required();
  synth_cmd->add_option("--depth", synth_depth, "expression depth limit");
  synth_cmd->add_option("--budget", synth_budget, "candidate construction cap");
  synth_cmd->add_option("--format", synth_format, "text|json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (lower_cmd->parsed()) return do_lower(lower_opts, lower_normalize, out);
    if (run_cmd->parsed()) return do_run(run_opts, run_env, run_trace, out);
    if (lint_cmd->parsed()) return do_lint(lint_opts, out);
    if (difftest_cmd->parsed())
      return do_difftest(difftest_opts, difftest_vars, difftest_wide, out);
    if (tt_cmd->parsed())
      return do_truthtable(tt_opts, tt_vars, tt_wide, out);
    if (synth_cmd->parsed())
      return do_synth(synth_official, synth_effective, synth_depth,
                      synth_budget, synth_format, out, err);
    err << "error: a subcommand is required\n";
    return 2;
  } catch (const SearchSpaceExceeded& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const StepLimitExceeded& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const StackOverflow& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const StackUnderflow& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ToolchainMismatch& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    err << fmt::format("error: {} (line {}, column {})\n", e.what(), e.line,
                       e.col);
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace condtrap
