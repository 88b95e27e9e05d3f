// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace nexf {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam. Moments are sized lazily on the first step.
class Adam {
  public:
    explicit Adam(AdamConfig config = {}) : config_(config) {}

    void step(std::span<double> params, std::span<const double> grads, double lr);

    std::int64_t steps() const { return step_; }
    const std::vector<double> &first_moment() const { return m_; }
    const std::vector<double> &second_moment() const { return v_; }
    const AdamConfig &config() const { return config_; }

    void restore(std::int64_t steps, std::vector<double> m, std::vector<double> v);

  private:
    AdamConfig config_;
    std::int64_t step_ = 0;
    std::vector<double> m_, v_;
};

// Linear warmup into a cosine decay from lr_max to lr_min over total steps.
double cosine_lr(std::int64_t step, std::int64_t total, double lr_max, double lr_min,
                 std::int64_t warmup);

}  // namespace nexf
