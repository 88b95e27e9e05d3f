// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/camera.hpp>
#include <nexf/rng.hpp>
#include <nexf/tape.hpp>

#include <array>
#include <span>
#include <vector>

namespace nexf {

using Rgb = std::array<double, 3>;

// Pinhole rays through pixel centers. near/far come from the slab test
// against bounds; rays that miss fall back to the bounding sphere interval.
std::vector<Ray> generate_rays(const Camera &camera, std::span<const Pixel> pixels,
                               const Aabb &bounds);
// Every pixel of the image, row-major.
std::vector<Pixel> all_pixels(const Camera &camera);
// (near, far) for a ray against bounds.
std::pair<double, double> ray_bounds(const Vec3 &origin, const Vec3 &direction,
                                     const Aabb &bounds);

// Stratified samples for a set of rays, ray-major.
struct RaySamples {
    int num_rays = 0;
    int num_samples = 0;
    Mat t;          // R x S distances along each ray
    Mat deltas;     // R x S spacings
    Mat positions;  // (R*S) x 3
    Mat directions; // (R*S) x 3, the ray direction repeated per sample
};

// One sample per equal bin of [near, far]: jittered uniformly inside the bin
// when jitter is given, at the bin midpoint otherwise. delta_j is the
// distance to the next sample; the last one is the bin width.
RaySamples sample_stratified(std::span<const Ray> rays, int num_samples, Rng *jitter);

// Per-ray quadrature record. Inputs are t/delta/sigma/color (and exposure,
// reg_diff for the exposure passes); composite_color fills alpha,
// transmittance and weights and marks them cached.
struct RaySampleBatch {
    std::vector<double> t;
    std::vector<double> delta;
    std::vector<double> sigma;
    std::vector<Rgb> color;
    std::vector<double> exposure;
    std::vector<double> reg_diff;

    std::vector<double> alpha;
    std::vector<double> transmittance;
    std::vector<double> weights;
    bool weights_cached = false;
};

// sum_j tau_j alpha_j c_j with alpha_j = 1 - exp(-sigma_j delta_j).
Rgb composite_color(RaySampleBatch &batch);
// sum_j w_j dt_j with the cached (frozen) weights.
double composite_exposure(const RaySampleBatch &batch);
// sum_j w_j diff_j with the cached (frozen) weights.
double composite_reg(const RaySampleBatch &batch);

// Batched weights for R rays: sigma and deltas are R x S.
Mat compositing_weights(const Mat &sigma, const Mat &deltas);
// weights (R x S) against ray-major values ((R*S) x k) -> R x k.
Mat composite(const Mat &weights, const Mat &values);

// The same weights recorded on a tape, via transmittance exp(-cumsum(sigma*delta)).
Tape::Var compositing_weights(Tape &tape, Tape::Var sigma, const Mat &deltas);

}  // namespace nexf
