// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/camera.hpp>
#include <nexf/mlp.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nexf {

enum class RadianceProfile { default_profile, forward_facing };

// Radiance field f(x, d, dt): a position branch producing a bottleneck plus
// raw density, and a view branch mapping (bottleneck + ln dt, posenc(d)) to
// RGB. With glo enabled every training image owns an affine (scale, shift)
// pair applied to the conditioned bottleneck.
struct RadianceFieldConfig {
    int posenc_levels_x = 8;
    int posenc_levels_d = 4;
    int bottleneck_dim = 256;
    std::vector<int> pos_hidden{256, 256};
    std::vector<int> view_hidden{256, 256, 256};
    // Feed the view-branch input again into its second layer.
    bool view_skip = true;
    bool glo = false;
    int glo_count = 0;

    static RadianceFieldConfig profile(RadianceProfile p);
    MlpSpec pos_spec() const;
    MlpSpec view_spec() const;
    void validate() const;
    bool operator==(const RadianceFieldConfig &) const = default;
};

struct ExposureFieldConfig {
    int posenc_levels = 4;
    std::vector<int> hidden{128, 128, 128, 128};

    // Output activation is softplus so predictions stay positive.
    MlpSpec spec() const;
    void validate() const;
    bool operator==(const ExposureFieldConfig &) const = default;
};

// Parameter segment prefixes inside the shared ParamStore.
inline constexpr const char *kPosPrefix = "radiance.pos";
inline constexpr const char *kViewPrefix = "radiance.view";
inline constexpr const char *kGloScale = "radiance.glo.scale";
inline constexpr const char *kGloShift = "radiance.glo.shift";
inline constexpr const char *kExposurePrefix = "exposure";

// True for segments owned by the radiance field (theta), false for phi.
bool is_radiance_segment(const std::string &name);

void register_radiance_field(ParamStore &store, const RadianceFieldConfig &cfg);
void register_exposure_field(ParamStore &store, const ExposureFieldConfig &cfg);
// Seeded initialization; the GLO table starts at the identity (zeros).
void init_radiance_field(ParamStore &store, const RadianceFieldConfig &cfg, Rng &rng);
void init_exposure_field(ParamStore &store, const ExposureFieldConfig &cfg, Rng &rng);

struct RadianceSample {
    double sigma = 0.0;
    Vec3 color = Vec3::Zero();
    std::vector<double> bottleneck;  // conditioned bottleneck fed to the view branch
};

// Single-point evaluation. glo_index selects a training image's embedding.
RadianceSample radiance_forward(const ParamStore &store, const RadianceFieldConfig &cfg,
                                const Vec3 &x, const Vec3 &d, double exposure,
                                std::optional<int> glo_index = std::nullopt);

struct RadianceBatch {
    Mat sigma;       // n x 1
    Mat color;       // n x 3
    Mat bottleneck;  // n x k, after conditioning (and GLO when used)
};

// Batched evaluation. log_exposure is n x 1 (ln dt per point); glo_index is
// empty or holds one training-image index per point.
RadianceBatch radiance_forward(const ParamStore &store, const RadianceFieldConfig &cfg,
                               const Mat &x, const Mat &d, const Mat &log_exposure,
                               std::span<const int> glo_index = {});

struct RadianceVars {
    Tape::Var sigma;
    Tape::Var color;
    Tape::Var bottleneck;
};

RadianceVars radiance_forward(Tape &tape, const ParamStore &store,
                              const RadianceFieldConfig &cfg, const Mat &x, const Mat &d,
                              const Mat &log_exposure, std::span<const int> glo_index = {});

// Predicted exposure softplus(mlp(posenc(x))) > 0; position only.
double exposure_forward(const ParamStore &store, const ExposureFieldConfig &cfg, const Vec3 &x);
Mat exposure_forward(const ParamStore &store, const ExposureFieldConfig &cfg, const Mat &x);
Tape::Var exposure_forward(Tape &tape, const ParamStore &store, const ExposureFieldConfig &cfg,
                           const Mat &x);

// (e(x) - e(x + eps))^2
double exposure_diff(const ParamStore &store, const ExposureFieldConfig &cfg, const Vec3 &x,
                     const Vec3 &eps);

}  // namespace nexf
