// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end tests of the installed binary.  The test runner passes the
// binary path as the first argument; everything runs through a shell with
// stdout/stderr captured to temporary files.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_cli_path;
int g_temp_counter = 0;

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'')
      q += "'\\''";
    else
      q += c;
  }
  return q + "'";
}

std::string temp_path(const std::string& suffix) {
  return "/tmp/condtrap_cli_" + std::to_string(getpid()) + "_" +
         std::to_string(g_temp_counter++) + suffix;
}

std::string write_temp(const std::string& suffix, const std::string& content) {
  std::string path = temp_path(suffix);
  std::ofstream f(path);
  f << content;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args,
                  const std::string& env_prefix = "") {
  std::string out_path = temp_path(".out");
  std::string err_path = temp_path(".err");
  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += shell_quote(g_cli_path);
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  cmd += " > " + shell_quote(out_path) + " 2> " + shell_quote(err_path);
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("no subcommand is a usage error") {
  CliResult r = run_cli({});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("--help succeeds and names the subcommands") {
  CliResult r = run_cli({"--help"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "lower"));
  CHECK(contains(r.out, "difftest"));
  CHECK(contains(r.out, "synth"));
}

TEST_CASE("an unknown subcommand is a usage error") {
  CHECK(run_cli({"frobnicate"}).code == 2);
}

TEST_CASE("lower prints the buggy build of a wrapped condition") {
  CliResult r = run_cli({"lower", "--cond", "!eax == ebx", "--mode", "buggy"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "cmp eax, ebx\n"
        "jne Lelse_0\n"
        "mark then_0\n"
        "jmp Lend_1\n"
        "Lelse_0:\n"
        "mark else_1\n"
        "Lend_1:\n"
        "halt\n");
}

TEST_CASE("lower --normalize renames labels in definition order") {
  CliResult r =
      run_cli({"lower", "--cond", "!eax == ebx", "--mode", "buggy", "--normalize"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "cmp eax, ebx\n"
        "jne L0\n"
        "mark then_0\n"
        "jmp L1\n"
        "L0:\n"
        "mark else_1\n"
        "L1:\n"
        "halt\n");
}

TEST_CASE("lower --format json emits one compact line") {
  CliResult r =
      run_cli({"lower", "--cond", "!eax", "--mode", "buggy", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        R"([{"op":"or","args":["eax","eax"]},{"op":"jne","target":"Lelse_0"},)"
        R"({"op":"mark","target":"then_0"},{"op":"jmp","target":"Lend_1"},)"
        R"({"op":"label","target":"Lelse_0"},{"op":"mark","target":"else_1"},)"
        R"({"op":"label","target":"Lend_1"},{"op":"halt"}])"
        "\n");
}

TEST_CASE("lower reads a block from a file") {
  std::string path = write_temp(".asm", ".if eax\n    nop\n.endif\n");
  CliResult r = run_cli({"lower", path});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "or eax, eax\n"));
  std::remove(path.c_str());
}

TEST_CASE("a missing input file is a usage error") {
  CliResult r = run_cli({"lower", "/nonexistent/block.asm"});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "cannot open"));
}

TEST_CASE("a file and --cond together are rejected") {
  std::string path = write_temp(".asm", ".if eax\n    nop\n.endif\n");
  CHECK(run_cli({"lower", path, "--cond", "eax"}).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("a condition that does not parse exits 2 with a message") {
  CliResult r = run_cli({"lower", "--cond", "eax =="});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "error"));
  CliResult chained = run_cli({"lower", "--cond", "eax == ebx == ecx"});
  CHECK(chained.code == 2);
  CHECK(contains(chained.err, "chained"));
}

TEST_CASE("run reports the mark trail") {
  CliResult r = run_cli({"run", "--cond", "!eax == ebx", "--mode", "buggy", "--env",
                         "eax=0,ebx=0"});
  CHECK(r.code == 0);
  CHECK(r.out == "marks: then_0\n");

  CliResult c = run_cli({"run", "--cond", "!eax == ebx", "--mode", "correct",
                         "--env", "eax=0", "--env", "ebx=0"});
  CHECK(c.code == 0);
  CHECK(c.out == "marks: else_1\n");
}

TEST_CASE("run --format json includes the step count") {
  CliResult r = run_cli({"run", "--cond", "!eax == ebx", "--mode", "buggy", "--env",
                         "eax=0,ebx=0", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(r.out == R"({"marks":["then_0"],"steps":6})"
                 "\n");
}

TEST_CASE("run without a matching arm prints a dash") {
  std::string path = write_temp(".asm", ".if eax\n    nop\n.endif\n");
  CliResult r = run_cli({"run", path, "--env", "eax=0"});
  CHECK(r.code == 0);
  CHECK(r.out == "marks: -\n");
  std::remove(path.c_str());
}

TEST_CASE("run --trace prints one line per executed instruction") {
  CliResult r = run_cli({"run", "--cond", "!eax == ebx", "--mode", "buggy", "--env",
                         "eax=0,ebx=0", "--trace"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "   0 | cmp eax, ebx             | ZF=1 CF=0 | esp=0x00010000\n"
        "   1 | jne Lelse_0              | ZF=1 CF=0 | esp=0x00010000\n"
        "   2 | mark then_0              | ZF=1 CF=0 | esp=0x00010000\n"
        "   3 | jmp Lend_1               | ZF=1 CF=0 | esp=0x00010000\n"
        "   6 | Lend_1:                  | ZF=1 CF=0 | esp=0x00010000\n"
        "   7 | halt                     | ZF=1 CF=0 | esp=0x00010000\n"
        "marks: then_0\n");
}

TEST_CASE("run with an unbound register exits 2") {
  CliResult r = run_cli({"run", "--cond", "eax", "--mode", "correct"});
  CHECK(r.code == 2);
  CHECK(contains(r.err, "eax"));
}

TEST_CASE("the step-limit override turns a finite run into a trap") {
  CliResult r = run_cli({"run", "--cond", "eax", "--env", "eax=1"},
                        "CONDTRAP_STEP_LIMIT=1");
  CHECK(r.code == 3);
  CHECK(contains(r.err, "step limit"));
}

TEST_CASE("lint on --cond reports columns relative to the condition") {
  CliResult r = run_cli({"lint", "--cond", "!eax == ebx"});
  CHECK(r.code == 1);
  CHECK(r.out ==
        "<cond>:1:1: error A2154: syntax error in control-flow directive\n");

  CliResult clean = run_cli({"lint", "--cond", "eax == ebx"});
  CHECK(clean.code == 0);
  CHECK(clean.out.empty());
}

TEST_CASE("lint on a file reports file positions, one line per finding") {
  std::string path = write_temp(
      ".asm", ".if !eax == 1\n    nop\n.elseif ebx == !0\n    nop\n.endif\n");
  CliResult r = run_cli({"lint", path});
  CHECK(r.code == 1);
  CHECK(r.out ==
        path + ":1:5: error A2154: syntax error in control-flow directive\n" +
        path + ":3:16: error A2154: syntax error in control-flow directive\n");
  std::remove(path.c_str());
}

TEST_CASE("difftest prints the divergence grid and exits 1 on findings") {
  CliResult r = run_cli({"difftest", "--cond", "!eax == ebx"});
  CHECK(r.code == 1);
  CHECK(r.out ==
        "condition: !eax == ebx\n"
        "eax=0 ebx=0 | ref=else_1 correct=else_1 buggy=then_0 DIVERGE\n"
        "eax=0 ebx=1 | ref=then_0 correct=then_0 buggy=else_1 DIVERGE\n"
        "eax=1 ebx=0 | ref=then_0 correct=then_0 buggy=else_1 DIVERGE\n"
        "eax=1 ebx=1 | ref=else_1 correct=else_1 buggy=then_0 DIVERGE\n"
        "divergent rows: 4 of 4\n");

  CliResult clean = run_cli({"difftest", "--cond", "eax == ebx"});
  CHECK(clean.code == 0);
  CHECK(contains(clean.out, "divergent rows: 0 of 4\n"));
}

TEST_CASE("difftest --wide surfaces divergences booleans hide") {
  CliResult narrow = run_cli({"difftest", "--cond", "!eax == !ebx && ecx"});
  CHECK(narrow.code == 0);
  CHECK(contains(narrow.out, "divergent rows: 0 of 8\n"));
  CliResult wide = run_cli({"difftest", "--cond", "!eax == !ebx && ecx", "--wide"});
  CHECK(wide.code == 1);
  CHECK(contains(wide.out, "divergent rows: 18 of 64\n"));
}

TEST_CASE("difftest --format json matches the library serialization") {
  CliResult r = run_cli({"difftest", "--cond", "!eax == ebx", "--format", "json"});
  CHECK(r.code == 1);
  CHECK(r.out ==
        R"({"condition":"!eax == ebx","variables":["eax","ebx"],"domain":[0,1],)"
        R"("rows":[{"assign":[0,0],"ref":0,"correct":0,"buggy":1,"divergent":true},)"
        R"({"assign":[0,1],"ref":1,"correct":1,"buggy":0,"divergent":true},)"
        R"({"assign":[1,0],"ref":1,"correct":1,"buggy":0,"divergent":true},)"
        R"({"assign":[1,1],"ref":0,"correct":0,"buggy":1,"divergent":true}],)"
        R"("divergent_count":4})"
        "\n");
}

TEST_CASE("difftest output is byte-for-byte reproducible") {
  std::vector<std::string> args = {"difftest", "--cond", "!eax == ebx", "--format",
                                   "json"};
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  CHECK(a.out == b.out);
  CHECK(a.code == b.code);
}

TEST_CASE("truthtable prints a grid for each mode") {
  CliResult buggy =
      run_cli({"truthtable", "--cond", "!eax == ebx", "--mode", "buggy"});
  CHECK(buggy.code == 0);
  CHECK(buggy.out ==
        "eax ebx | out\n"
        "  0   0 | 1\n"
        "  0   1 | 0\n"
        "  1   0 | 0\n"
        "  1   1 | 1\n");

  CliResult correct = run_cli({"truthtable", "--cond", "!eax == ebx"});
  CHECK(correct.code == 0);
  CHECK(correct.out ==
        "eax ebx | out\n"
        "  0   0 | 0\n"
        "  0   1 | 1\n"
        "  1   0 | 1\n"
        "  1   1 | 0\n");
}

TEST_CASE("truthtable --wide widens the value columns") {
  CliResult r = run_cli({"truthtable", "--cond", "eax", "--wide"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "       eax | out\n"
        "         0 | 0\n"
        "         1 | 1\n"
        "         2 | 1\n"
        "4294967295 | 1\n");
}

TEST_CASE("truthtable --vars fixes the variable order and closure") {
  CliResult r = run_cli({"truthtable", "--cond", "eax == ebx", "--vars", "ebx,eax",
                         "--format", "json"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        R"({"variables":["ebx","eax"],"domain":[0,1],)"
        R"("rows":[{"assign":[0,0],"out":1},{"assign":[0,1],"out":0},)"
        R"({"assign":[1,0],"out":0},{"assign":[1,1],"out":1}]})"
        "\n");
  // A condition variable missing from --vars cannot be evaluated.
  CHECK(run_cli({"truthtable", "--cond", "eax == ebx", "--vars", "eax"}).code == 2);
}

TEST_CASE("synth finds the planted condition from two table files") {
  std::string official = write_temp(
      "_official.json",
      R"({"variables":["a"],"domain":[0,1],"rows":[{"assign":[0],"out":1},{"assign":[1],"out":0}]})");
  std::string effective = write_temp(
      "_effective.json",
      R"({"variables":["a"],"domain":[0,1],"rows":[{"assign":[0],"out":0},{"assign":[1],"out":1}]})");

  CliResult text = run_cli({"synth", "--official", official, "--effective", effective});
  CHECK(text.code == 0);
  CHECK(text.out == "!0 != a\n");

  CliResult json = run_cli({"synth", "--official", official, "--effective", effective,
                            "--format", "json"});
  CHECK(json.code == 0);
  CHECK(json.out == R"({"condition":"!0 != a","node_count":2,"depth":3})"
                    "\n");

  CliResult shallow = run_cli(
      {"synth", "--official", official, "--effective", effective, "--depth", "2"});
  CHECK(shallow.code == 1);
  CHECK(contains(shallow.err, "no condition"));

  CliResult starved = run_cli(
      {"synth", "--official", official, "--effective", effective, "--budget", "2"});
  CHECK(starved.code == 1);
  CHECK(contains(starved.err, "budget"));

  std::remove(official.c_str());
  std::remove(effective.c_str());
}

TEST_CASE("a bad mode value is a usage error") {
  CHECK(run_cli({"lower", "--cond", "eax", "--mode", "sideways"}).code == 2);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <condtrap-binary> [doctest args]\n", argv[0]);
    return 1;
  }
  g_cli_path = argv[1];
  doctest::Context ctx(argc - 1, argv + 1);
  return ctx.run();
}
