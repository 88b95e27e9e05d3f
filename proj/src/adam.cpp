// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/adam.hpp>
#include <nexf/param_store.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nexf {

void Adam::step(std::span<double> params, std::span<const double> grads, double lr) {
    if (params.size() != grads.size())
        throw Error("adam: parameter and gradient sizes differ");
    if (m_.empty()) {
        m_.assign(params.size(), 0.0);
        v_.assign(params.size(), 0.0);
    }
    if (m_.size() != params.size())
        throw Error("adam: optimizer state does not match parameter count");
    ++step_;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m_[i] = b1 * m_[i] + (1.0 - b1) * g;
        v_[i] = b2 * v_[i] + (1.0 - b2) * g * g;
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
}

void Adam::restore(std::int64_t steps, std::vector<double> m, std::vector<double> v) {
    if (m.size() != v.size())
        throw Error("adam: moment vectors differ in length");
    step_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
}

double cosine_lr(std::int64_t step, std::int64_t total, double lr_max, double lr_min,
                 std::int64_t warmup) {
    const double progress =
        total > 0 ? std::clamp(static_cast<double>(step) / static_cast<double>(total), 0.0, 1.0)
                  : 1.0;
    const double cosine =
        lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * progress));
    const double ramp =
        warmup > 0 ? std::min(1.0, static_cast<double>(step + 1) / static_cast<double>(warmup))
                   : 1.0;
    return cosine * ramp;
}

}  // namespace nexf
