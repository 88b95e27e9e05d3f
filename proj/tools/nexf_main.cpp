// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/cli.hpp>

#include <iostream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

int main(int argc, char **argv) {
#if defined(__GLIBC__)
    // Training allocates many short-lived multi-megabyte matrices; keep them
    // on the heap instead of fresh mmap regions.
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
    return nexf::run_cli(argc, argv, std::cout, std::cerr);
}
