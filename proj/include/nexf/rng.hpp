// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace nexf {

// Seeded generator with serializable state. Uniform and normal draws are
// computed here rather than through <random> distributions so that the
// engine state alone determines the stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // Independent stream derived from (seed, name), e.g. "init", "sampling".
    static Rng substream(std::uint64_t seed, std::string_view name);

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, 1).
    double uniform();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    // Standard normal via Box-Muller (no cached second value).
    double normal();

    std::string state() const;
    void set_state(const std::string &state);

    bool operator==(const Rng &other) const { return engine_ == other.engine_; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace nexf
