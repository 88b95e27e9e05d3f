// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/renderer.hpp>
#include <nexf/tape.hpp>

#include <span>

namespace nexf {

struct WeightConfig {
    double sigma_exp = 0.05;
    double lambda_exp = 0.1;
    double lambda_sat = 1.0;
    // w_sat is replaced by max(w_sat, sat_floor) before powering.
    double sat_floor = 0.0;
    // Coefficient on the rendered smoothness term inside the exposure loss.
    double reg_weight = 1.0;

    void validate() const;
    bool operator==(const WeightConfig &) const = default;
};

// prod_i exp(-(c_i - 1/2)^2 / sigma_exp)
double well_exposedness(const Rgb &c, double sigma_exp);
// Population standard deviation of the three channels.
double saturation(const Rgb &c);
// w_exp^lambda_exp * max(w_sat, sat_floor)^lambda_sat
double pixel_weight(const Rgb &c, const WeightConfig &cfg);

// Sum over rays of squared RGB error (not a mean).
double photometric_loss(std::span<const Rgb> predicted, std::span<const Rgb> target);

// sum_r w_r (dt_pixel_r - dt_r)^2 + reg_weight * dt_reg_r. The weights w_r
// are computed by the caller from the input view's pixel colors.
double exposure_loss(std::span<const double> exposure_pixel, std::span<const double> exposure_target,
                     std::span<const double> pixel_weights, std::span<const double> exposure_reg,
                     double reg_weight = 1.0);
// Convenience overload computing the weights from ground-truth colors.
double exposure_loss(std::span<const double> exposure_pixel, std::span<const double> exposure_target,
                     std::span<const Rgb> gt_colors, std::span<const double> exposure_reg,
                     const WeightConfig &cfg);

// Tape forms used during training. predicted/target are R x 3.
Tape::Var photometric_loss(Tape &tape, Tape::Var predicted, const Mat &target);
// exposure_pixel, exposure_reg: R x 1 tape values; targets and weights: R x 1.
Tape::Var exposure_loss(Tape &tape, Tape::Var exposure_pixel, const Mat &exposure_target,
                        const Mat &pixel_weights, Tape::Var exposure_reg, double reg_weight);

}  // namespace nexf
