// Part of the condtrap project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace condtrap {

// Entry point for the `condtrap` tool.  Exit codes:
//   0  success / no findings
//   1  findings (lint diagnostics, divergent rows, synthesis not found)
//   2  usage or parse errors (bad flags, malformed condition, bad inputs)
//   3  internal invariant violations (toolchain mismatch, machine traps)
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace condtrap
