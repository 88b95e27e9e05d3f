// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/fields.hpp>
#include <nexf/fusion.hpp>
#include <nexf/scene.hpp>
#include <nexf/trainer.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace nexf {

// Invalid run configuration; what() names the offending field.
class ConfigError : public Error {
  public:
    using Error::Error;
};

struct SceneConfig {
    // "two_region" or "custom" (primitives given explicitly).
    std::string preset = "two_region";
    SceneField field = two_region_scene();
    RigConfig rig;
    std::vector<double> exposure_set{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0};
    DatasetOptions capture;

    bool operator==(const SceneConfig &) const = default;
};

struct RunConfig {
    SceneConfig scene;
    RadianceProfile profile = RadianceProfile::default_profile;
    RadianceFieldConfig radiance;
    ExposureFieldConfig exposure;
    // train.weights and train.seed mirror the "weights" and "seed" sections.
    TrainConfig train;
    FusionConfig fusion;
    TestConditioning conditioning = TestConditioning::per_point;
    std::string output_dir = "out";
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const RunConfig &) const = default;
};

// JSON document -> RunConfig. The "scene" section is required; every other
// section falls back to defaults. Unknown keys are rejected.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path &path);
std::string dump_run_config(const RunConfig &cfg);

std::string profile_name(RadianceProfile p);
std::string conditioning_name(TestConditioning c);

}  // namespace nexf
