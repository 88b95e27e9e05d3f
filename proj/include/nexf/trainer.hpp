// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/adam.hpp>
#include <nexf/fields.hpp>
#include <nexf/image.hpp>
#include <nexf/objectives.hpp>
#include <nexf/renderer.hpp>
#include <nexf/scene.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace nexf {

struct TrainConfig {
    std::int64_t iterations = 10000;
    int rays_per_batch = 1024;
    int samples_per_ray = 64;
    double lr_max = 5e-3;
    double lr_min = 5e-4;
    std::int64_t warmup = 200;
    // Standard deviation of the offset used by the smoothness term.
    double reg_noise = 0.05;
    WeightConfig weights;
    std::uint64_t seed = 0;

    // 10,000 iterations for forward-facing captures, 25,000 for rooms.
    static TrainConfig forward_facing();
    static TrainConfig room_scale();
    void validate() const;
    bool operator==(const TrainConfig &) const = default;
};

// How test-time renders pick the exposure a sample is conditioned on when
// following the exposure field: per_point uses e(x_j) at every sample,
// per_pixel composites e along the ray first and conditions every sample on
// the normalized result.
enum class TestConditioning { per_point, per_pixel };

struct Model {
    RadianceFieldConfig radiance;
    ExposureFieldConfig exposure;
    ParamStore params;
    Aabb bounds;
    int samples_per_ray = 64;
    TestConditioning conditioning = TestConditioning::per_point;

    bool operator==(const Model &) const = default;
};

// Registers and initializes both fields from the "init" substream of seed.
Model init_model(const RadianceFieldConfig &radiance, const ExposureFieldConfig &exposure,
                 const Aabb &bounds, int samples_per_ray, std::uint64_t seed);

struct Checkpoint {
    Model model;
    TrainConfig train;
    std::int64_t iteration = 0;
    Adam optimizer;
    Rng sampling;
    Rng jitter;
    Rng noise;
};

// Fresh training state. GLO tables (when enabled) get one row per train view.
Checkpoint init_checkpoint(RadianceFieldConfig radiance, const ExposureFieldConfig &exposure,
                           const TrainConfig &train, const DatasetManifest &manifest);
void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::filesystem::path &path);

struct LossRecord {
    std::int64_t iteration = 0;
    double photometric = 0.0;
    double exposure = 0.0;
    double total = 0.0;
};

// Everything one optimization step needs about its rays.
struct RayBatch {
    RaySamples samples;
    Mat gt_color;                // R x 3 input-view pixel colors
    Mat exposure;                // R x 1 input exposure of each ray
    std::vector<int> glo_index;  // per sample; empty disables GLO
    Mat noise;                   // (R*S) x 3 offsets for the smoothness term
};

struct LossGraph {
    Tape::Var photometric;
    Tape::Var exposure;
    Tape::Var total;
    Tape::Var weights;
    Tape::Var color;
    Tape::Var exposure_pixel;
    Tape::Var exposure_reg;
};

// L = L_f + L_e. Colors are conditioned on the input exposure; the exposure
// and smoothness terms are composited with detached weights and weighted
// per ray by pixel_weight of the input color.
LossGraph build_training_loss(Tape &tape, const Model &model, const WeightConfig &weights,
                              const RayBatch &batch);

class Trainer {
  public:
    Trainer(const Dataset &data, Checkpoint ckpt);

    // One Adam step. Throws Error naming the iteration on non-finite values.
    LossRecord step();
    // Steps until the configured iteration count.
    void run(const std::function<void(const LossRecord &)> &on_step = {});

    RayBatch sample_batch();
    const Checkpoint &checkpoint() const { return ckpt_; }
    Checkpoint release() { return std::move(ckpt_); }

  private:
    const Dataset &data_;
    Checkpoint ckpt_;
    std::vector<std::size_t> train_views_;
};

// train(): run a fresh or resumed checkpoint to completion.
Checkpoint train(const Dataset &data, Checkpoint ckpt, std::vector<LossRecord> *trace = nullptr);
void write_loss_csv(const std::filesystem::path &path, const std::vector<LossRecord> &trace);

struct RenderMode {
    enum class Kind { input_exposure, nexf };
    Kind kind = Kind::nexf;
    double exposure = 1.0;

    static RenderMode at_exposure(double exposure) { return {Kind::input_exposure, exposure}; }
    static RenderMode nexf() { return {Kind::nexf, 1.0}; }
};

// Test-time render (GLO at identity, midpoint samples).
ImageBuffer render_view(const Model &model, const Camera &camera, RenderMode mode);
// Per-pixel composited exposure-field prediction (1 channel).
ImageBuffer export_exposure_map(const Model &model, const Camera &camera);

}  // namespace nexf
