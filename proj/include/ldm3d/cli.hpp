// Copyright Contributors to the ldm3d-toolkit Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>

namespace ldm3d::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Parses argv, dispatches to one subcommand and maps failures to exit
/// codes: 1 for usage errors, 2 for errors raised while processing data.
/// Help text goes to `out`, diagnostics to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ldm3d::cli
