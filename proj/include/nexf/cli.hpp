// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace nexf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the nexf command-line tool:
//   synth | train | render | expmap | fuse | eval | defaults
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace nexf
