// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/objectives.hpp>
#include <nexf/param_store.hpp>

#include <algorithm>
#include <cmath>

namespace nexf {

void WeightConfig::validate() const {
    if (!(sigma_exp > 0.0))
        throw Error("weights: sigma_exp must be positive");
    if (!(lambda_exp >= 0.0) || !(lambda_sat >= 0.0) || !(sat_floor >= 0.0) ||
        !(reg_weight >= 0.0))
        throw Error("weights: lambda_exp, lambda_sat, sat_floor and reg_weight must be >= 0");
}

double well_exposedness(const Rgb &c, double sigma_exp) {
    if (!(sigma_exp > 0.0))
        throw Error("well_exposedness: sigma_exp must be positive");
    double sum = 0.0;
    for (double v : c)
        sum += (v - 0.5) * (v - 0.5);
    return std::exp(-sum / sigma_exp);
}

double saturation(const Rgb &c) {
    const double mean = (c[0] + c[1] + c[2]) / 3.0;
    double var = 0.0;
    for (double v : c)
        var += (v - mean) * (v - mean);
    return std::sqrt(var / 3.0);
}

double pixel_weight(const Rgb &c, const WeightConfig &cfg) {
    const double wexp = well_exposedness(c, cfg.sigma_exp);
    const double wsat = std::max(saturation(c), cfg.sat_floor);
    // pow(0, 0) = 1 keeps the empty-product case exact.
    return std::pow(wexp, cfg.lambda_exp) * std::pow(wsat, cfg.lambda_sat);
}

double photometric_loss(std::span<const Rgb> predicted, std::span<const Rgb> target) {
    if (predicted.size() != target.size())
        throw Error("photometric_loss: batch sizes differ");
    double loss = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        for (int c = 0; c < 3; ++c) {
            const double e = predicted[i][c] - target[i][c];
            loss += e * e;
        }
    return loss;
}

double exposure_loss(std::span<const double> exposure_pixel, std::span<const double> exposure_target,
                     std::span<const double> pixel_weights, std::span<const double> exposure_reg,
                     double reg_weight) {
    const std::size_t n = exposure_pixel.size();
    if (exposure_target.size() != n || pixel_weights.size() != n || exposure_reg.size() != n)
        throw Error("exposure_loss: batch sizes differ");
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = exposure_pixel[i] - exposure_target[i];
        loss += pixel_weights[i] * e * e + reg_weight * exposure_reg[i];
    }
    return loss;
}

double exposure_loss(std::span<const double> exposure_pixel, std::span<const double> exposure_target,
                     std::span<const Rgb> gt_colors, std::span<const double> exposure_reg,
                     const WeightConfig &cfg) {
    std::vector<double> w(gt_colors.size());
    std::transform(gt_colors.begin(), gt_colors.end(), w.begin(),
                   [&](const Rgb &c) { return pixel_weight(c, cfg); });
    return exposure_loss(exposure_pixel, exposure_target, w, exposure_reg, cfg.reg_weight);
}

Tape::Var photometric_loss(Tape &tape, Tape::Var predicted, const Mat &target) {
    return tape.sum(tape.square(tape.sub(predicted, tape.constant(target))));
}

Tape::Var exposure_loss(Tape &tape, Tape::Var exposure_pixel, const Mat &exposure_target,
                        const Mat &pixel_weights, Tape::Var exposure_reg, double reg_weight) {
    Tape::Var err = tape.square(tape.sub(exposure_pixel, tape.constant(exposure_target)));
    Tape::Var data = tape.sum(tape.mul(tape.constant(pixel_weights), err));
    return tape.add(data, tape.scale(tape.sum(exposure_reg), reg_weight));
}

}  // namespace nexf
