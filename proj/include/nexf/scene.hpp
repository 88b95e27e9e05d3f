// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/camera.hpp>
#include <nexf/image.hpp>
#include <nexf/renderer.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nexf {

// Smooth multiplicative pattern 1 + amplitude * prod_a sin(frequency_a x_a + phase_a).
struct Texture {
    double amplitude = 0.0;
    Vec3 frequency = Vec3::Zero();
    Vec3 phase = Vec3::Zero();

    double factor(const Vec3 &x) const;
    bool operator==(const Texture &) const = default;
};

enum class ShapeKind { sphere, box };

struct Primitive {
    ShapeKind shape = ShapeKind::box;
    Vec3 center = Vec3::Zero();
    // Box half extents; for spheres only x() is used as the radius.
    Vec3 size = Vec3::Ones();
    double density = 0.0;
    Vec3 radiance = Vec3::Zero();
    Texture texture;

    bool contains(const Vec3 &x) const;
    Aabb bounds() const;
    bool operator==(const Primitive &) const = default;
};

// Analytic ground truth: density and emitted HDR radiance per point.
struct SceneField {
    std::vector<Primitive> primitives;
    Vec3 background = Vec3::Zero();

    // Union of primitive bounds.
    Aabb bounds() const;
    // Bounds used for ray near/far: bounds() grown by 5% per side.
    Aabb render_bounds() const { return bounds().expanded(0.05); }
    void validate() const;
    bool operator==(const SceneField &) const = default;
};

struct ScenePoint {
    double sigma = 0.0;
    Vec3 radiance = Vec3::Zero();
};

// The last-listed primitive containing x wins; outside every primitive the
// result is (0, background).
ScenePoint eval_scene(const SceneField &scene, const Vec3 &x);

// Bright emitter over x < 0, dim emitter over x > 0, both textured, density 4.
SceneField two_region_scene();
// Index of the two_region primitive that owns x: 1 bright, 0 dim, -1 none.
int two_region_label(const Vec3 &x);

// Cameras on an arc in front of the scene looking at the origin.
struct RigConfig {
    int train_views = 12;
    int test_views = 4;
    int width = 64;
    int height = 64;
    double radius = 3.6;
    double fov_y_deg = 40.0;
    double azimuth_span_deg = 110.0;
    bool operator==(const RigConfig &) const = default;
};
std::vector<Camera> rig_train_cameras(const RigConfig &rig);
std::vector<Camera> rig_test_cameras(const RigConfig &rig);

// Reference ray marcher against the analytic field (midpoint stratified
// samples, no jitter).
ImageBuffer render_hdr(const SceneField &scene, const Camera &camera, int num_samples = 256);

// Gamma camera response with hard clipping: clamp((E * dt)^(1/gamma), 0, 1).
double capture_ldr(double radiance, double exposure, double gamma = 2.2);
ImageBuffer capture_ldr(const ImageBuffer &hdr, double exposure, double gamma = 2.2);

struct ManifestView {
    Camera camera;
    double exposure = 1.0;
    std::string image;
    std::string split = "train";
    // Test views share a view_id across their exposure stack.
    int view_id = 0;
    bool operator==(const ManifestView &) const = default;
};

struct DatasetManifest {
    std::vector<double> exposure_set;
    std::vector<ManifestView> views;
    // Ray near/far bounds of the captured scene.
    Aabb bounds{Vec3::Constant(-1.0), Vec3::Constant(1.0)};

    std::vector<std::size_t> indices(const std::string &split) const;
    bool operator==(const DatasetManifest &) const = default;
};

// A manifest with its LDR images loaded (images[i] belongs to views[i]) and,
// when available, the HDR render of each test camera indexed by view_id.
struct Dataset {
    DatasetManifest manifest;
    std::vector<ImageBuffer> images;
    std::vector<ImageBuffer> test_hdr;
};

struct DatasetOptions {
    double gamma = 2.2;
    int gt_samples = 256;
    bool operator==(const DatasetOptions &) const = default;
};

// Train cameras get one exposure each (a seeded balanced draw from the
// exposure set); test cameras are captured at every exposure. Images are
// quantized to 8 bits in memory exactly as they are written to disk.
Dataset build_dataset(const SceneField &scene, const std::vector<Camera> &train_cameras,
                      const std::vector<Camera> &test_cameras,
                      const std::vector<double> &exposure_set, std::uint64_t seed,
                      const DatasetOptions &options = {});

// Exposures for n train views: each set value appears floor(n/m) or
// ceil(n/m) times, in a seeded random order.
std::vector<double> sample_exposures(const std::vector<double> &exposure_set, std::size_t n,
                                     std::uint64_t seed);

// Writes every image at its manifest path (relative to dir) plus
// manifest.json; the HDR renders of the test cameras go to
// hdr/test_<id>.pfm. Returns the manifest path.
std::filesystem::path write_dataset(const Dataset &dataset, const std::filesystem::path &dir);
void write_manifest(const DatasetManifest &manifest, const std::filesystem::path &path);
DatasetManifest read_manifest(const std::filesystem::path &path);
// Reads the manifest and every referenced image (paths relative to it).
Dataset load_dataset(const std::filesystem::path &manifest_path);

}  // namespace nexf
