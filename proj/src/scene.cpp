// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/scene.hpp>

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace nexf {

double Texture::factor(const Vec3 &x) const {
    if (amplitude == 0.0)
        return 1.0;
    double p = 1.0;
    for (int a = 0; a < 3; ++a)
        p *= std::sin(frequency[a] * x[a] + phase[a]);
    return 1.0 + amplitude * p;
}

bool Primitive::contains(const Vec3 &x) const {
    if (shape == ShapeKind::sphere)
        return (x - center).squaredNorm() <= size.x() * size.x();
    return ((x - center).cwiseAbs().array() <= size.array()).all();
}

Aabb Primitive::bounds() const {
    const Vec3 half = shape == ShapeKind::sphere ? Vec3::Constant(size.x()) : size;
    return Aabb{center - half, center + half};
}

Aabb SceneField::bounds() const {
    if (primitives.empty())
        return Aabb{Vec3::Constant(-1.0), Vec3::Constant(1.0)};
    Aabb box = primitives.front().bounds();
    for (const Primitive &p : primitives) {
        const Aabb b = p.bounds();
        box.lo = box.lo.cwiseMin(b.lo);
        box.hi = box.hi.cwiseMax(b.hi);
    }
    return box;
}

void SceneField::validate() const {
    for (const Primitive &p : primitives) {
        if (!(p.density >= 0.0) || !std::isfinite(p.density))
            throw Error("scene primitive density must be finite and >= 0");
        if (!p.radiance.allFinite() || (p.radiance.array() < 0.0).any())
            throw Error("scene primitive radiance must be finite and >= 0");
        if ((p.size.array() <= 0.0).any())
            throw Error("scene primitive size must be positive");
        if (std::abs(p.texture.amplitude) >= 1.0)
            throw Error("texture amplitude must lie in (-1, 1) to keep radiance nonnegative");
    }
    if (!background.allFinite() || (background.array() < 0.0).any())
        throw Error("scene background must be finite and >= 0");
}

ScenePoint eval_scene(const SceneField &scene, const Vec3 &x) {
    for (auto it = scene.primitives.rbegin(); it != scene.primitives.rend(); ++it)
        if (it->contains(x))
            return {it->density, it->radiance * it->texture.factor(x)};
    return {0.0, scene.background};
}

SceneField two_region_scene() {
    const Texture texture{0.3, Vec3(3.5, 4.0, 3.0), Vec3(0.4, 1.1, 0.9)};
    Primitive dim;
    dim.center = Vec3::Zero();
    dim.size = Vec3(1.0, 0.7, 0.6);
    dim.density = 4.0;
    dim.radiance = 0.05 * Vec3(0.35, 0.6, 1.0);
    dim.texture = texture;
    // Listed last so it owns the x < 0 half.
    Primitive bright = dim;
    bright.center = Vec3(-0.5, 0.0, 0.0);
    bright.size = Vec3(0.5, 0.7, 0.6);
    bright.radiance = 8.0 * Vec3(1.0, 0.62, 0.32);
    SceneField scene;
    scene.primitives = {dim, bright};
    return scene;
}

int two_region_label(const Vec3 &x) {
    static const SceneField scene = two_region_scene();
    for (int i = static_cast<int>(scene.primitives.size()) - 1; i >= 0; --i)
        if (scene.primitives[static_cast<std::size_t>(i)].contains(x))
            return i;
    return -1;
}

namespace {

Camera orbit_camera(const RigConfig &rig, double azimuth_deg, double elevation_deg) {
    const double az = azimuth_deg * M_PI / 180.0, el = elevation_deg * M_PI / 180.0;
    const Vec3 eye(rig.radius * std::cos(el) * std::sin(az), rig.radius * std::sin(el),
                   rig.radius * std::cos(el) * std::cos(az));
    return Camera::look_at(eye, Vec3::Zero(), Vec3::UnitY(), rig.fov_y_deg, rig.width,
                           rig.height);
}

}  // namespace

std::vector<Camera> rig_train_cameras(const RigConfig &rig) {
    std::vector<Camera> cams;
    const int n = rig.train_views;
    for (int i = 0; i < n; ++i) {
        const double u = n > 1 ? static_cast<double>(i) / (n - 1) : 0.5;
        const double az = (u - 0.5) * rig.azimuth_span_deg;
        cams.push_back(orbit_camera(rig, az, i % 2 == 0 ? 10.0 : 25.0));
    }
    return cams;
}

std::vector<Camera> rig_test_cameras(const RigConfig &rig) {
    std::vector<Camera> cams;
    const int n = rig.test_views;
    for (int i = 0; i < n; ++i) {
        // Interleaved with the train azimuths, inside 3/4 of the span.
        const double u = (static_cast<double>(i) + 0.5) / n;
        const double az = (u - 0.5) * 0.75 * rig.azimuth_span_deg;
        cams.push_back(orbit_camera(rig, az, 17.5));
    }
    return cams;
}

ImageBuffer render_hdr(const SceneField &scene, const Camera &camera, int num_samples) {
    camera.validate();
    ImageBuffer img(camera.width, camera.height, 3);
    const Aabb bounds = scene.render_bounds();
    std::vector<Pixel> row_pixels(static_cast<std::size_t>(camera.width));
    for (int r = 0; r < camera.height; ++r) {
        for (int c = 0; c < camera.width; ++c)
            row_pixels[static_cast<std::size_t>(c)] = {r, c};
        const std::vector<Ray> rays = generate_rays(camera, row_pixels, bounds);
        const RaySamples samples = sample_stratified(rays, num_samples, nullptr);
        Mat sigma(samples.num_rays, samples.num_samples);
        Mat radiance(samples.positions.rows(), 3);
        for (Index i = 0; i < samples.positions.rows(); ++i) {
            const ScenePoint p = eval_scene(scene, samples.positions.row(i).transpose());
            sigma(i / num_samples, i % num_samples) = p.sigma;
            radiance.row(i) = p.radiance.transpose();
        }
        const Mat color = composite(compositing_weights(sigma, samples.deltas), radiance);
        for (int c = 0; c < camera.width; ++c)
            for (int ch = 0; ch < 3; ++ch)
                img.at(r, c, ch) = color(c, ch);
    }
    return img;
}

double capture_ldr(double radiance, double exposure, double gamma) {
    if (!(exposure > 0.0))
        throw Error("capture_ldr: exposure must be positive");
    if (!(gamma > 0.0))
        throw Error("capture_ldr: gamma must be positive");
    if (radiance < 0.0)
        throw Error("capture_ldr: radiance must be nonnegative");
    return std::clamp(std::pow(radiance * exposure, 1.0 / gamma), 0.0, 1.0);
}

ImageBuffer capture_ldr(const ImageBuffer &hdr, double exposure, double gamma) {
    ImageBuffer out(hdr.width, hdr.height, hdr.channels);
    for (std::size_t i = 0; i < hdr.data.size(); ++i)
        out.data[i] = capture_ldr(hdr.data[i], exposure, gamma);
    return out;
}

std::vector<std::size_t> DatasetManifest::indices(const std::string &split) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < views.size(); ++i)
        if (views[i].split == split)
            out.push_back(i);
    return out;
}

std::vector<double> sample_exposures(const std::vector<double> &exposure_set, std::size_t n,
                                     std::uint64_t seed) {
    if (exposure_set.empty())
        throw Error("exposure set is empty");
    Rng rng = Rng::substream(seed, "exposures");
    std::vector<double> out;
    while (out.size() < n) {
        std::vector<double> round = exposure_set;
        // Fisher-Yates with the project RNG so the order is reproducible.
        for (std::size_t i = round.size(); i > 1; --i)
            std::swap(round[i - 1], round[rng.below(i)]);
        for (double e : round)
            if (out.size() < n)
                out.push_back(e);
    }
    return out;
}

namespace {

ImageBuffer quantized(const ImageBuffer &img) {
    ImageBuffer out = img;
    for (double &v : out.data)
        v = quantize_unit(v) / 255.0;
    return out;
}

std::string indexed_name(const char *prefix, int index) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%02d", prefix, index);
    return buf;
}

}  // namespace

Dataset build_dataset(const SceneField &scene, const std::vector<Camera> &train_cameras,
                      const std::vector<Camera> &test_cameras,
                      const std::vector<double> &exposure_set, std::uint64_t seed,
                      const DatasetOptions &options) {
    if (train_cameras.empty() && test_cameras.empty())
        throw Error("build_dataset: no cameras");
    if (exposure_set.empty())
        throw Error("build_dataset: exposure set is empty");
    for (double e : exposure_set)
        if (!(e > 0.0))
            throw Error("build_dataset: exposures must be positive");
    scene.validate();

    Dataset ds;
    ds.manifest.exposure_set = exposure_set;
    ds.manifest.bounds = scene.render_bounds();
    const std::vector<double> exposures = sample_exposures(exposure_set, train_cameras.size(), seed);
    for (std::size_t i = 0; i < train_cameras.size(); ++i) {
        const ImageBuffer hdr = render_hdr(scene, train_cameras[i], options.gt_samples);
        ManifestView view;
        view.camera = train_cameras[i];
        view.exposure = exposures[i];
        view.split = "train";
        view.view_id = static_cast<int>(i);
        view.image = "images/" + indexed_name("train", view.view_id) + ".ppm";
        ds.manifest.views.push_back(view);
        ds.images.push_back(quantized(capture_ldr(hdr, view.exposure, options.gamma)));
    }
    for (std::size_t i = 0; i < test_cameras.size(); ++i) {
        ImageBuffer hdr = render_hdr(scene, test_cameras[i], options.gt_samples);
        for (std::size_t k = 0; k < exposure_set.size(); ++k) {
            ManifestView view;
            view.camera = test_cameras[i];
            view.exposure = exposure_set[k];
            view.split = "test";
            view.view_id = static_cast<int>(i);
            view.image = "images/" + indexed_name("test", view.view_id) + "_e" +
                         std::to_string(k) + ".ppm";
            ds.manifest.views.push_back(view);
            ds.images.push_back(quantized(capture_ldr(hdr, view.exposure, options.gamma)));
        }
        ds.test_hdr.push_back(std::move(hdr));
    }
    return ds;
}

void write_manifest(const DatasetManifest &manifest, const std::filesystem::path &path) {
    Json views = Json::array();
    for (const ManifestView &v : manifest.views)
        views.push_back(Json{{"camera", camera_to_json(v.camera)},
                             {"exposure", v.exposure},
                             {"image", v.image},
                             {"split", v.split},
                             {"view_id", v.view_id}});
    const Json doc{{"exposure_set", manifest.exposure_set},
                   {"bounds", Json{{"lo", vec3_to_json(manifest.bounds.lo)},
                                   {"hi", vec3_to_json(manifest.bounds.hi)}}},
                   {"views", views}};
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << "\n";
}

DatasetManifest read_manifest(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open manifest " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::exception &e) {
        throw Error("manifest " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.exposure_set = doc.at("exposure_set").get<std::vector<double>>();
        if (doc.contains("bounds")) {
            m.bounds.lo = vec3_from_json(doc["bounds"].at("lo"), "bounds.lo");
            m.bounds.hi = vec3_from_json(doc["bounds"].at("hi"), "bounds.hi");
        }
        for (const Json &v : doc.at("views")) {
            ManifestView view;
            view.camera = camera_from_json(v.at("camera"));
            view.exposure = v.at("exposure").get<double>();
            view.image = v.at("image").get<std::string>();
            view.split = v.at("split").get<std::string>();
            view.view_id = v.value("view_id", 0);
            if (view.split != "train" && view.split != "test")
                throw Error("view split must be 'train' or 'test'");
            if (!(view.exposure > 0.0))
                throw Error("view exposure must be positive");
            if (std::find(m.exposure_set.begin(), m.exposure_set.end(), view.exposure) ==
                m.exposure_set.end())
                throw Error("view exposure is not in the exposure set");
            m.views.push_back(std::move(view));
        }
    } catch (const Json::exception &e) {
        throw Error("manifest " + path.string() + ": " + e.what());
    }
    return m;
}

std::filesystem::path write_dataset(const Dataset &dataset, const std::filesystem::path &dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "images");
    for (std::size_t i = 0; i < dataset.manifest.views.size(); ++i)
        write_ppm(dir / dataset.manifest.views[i].image, dataset.images[i]);
    if (!dataset.test_hdr.empty()) {
        fs::create_directories(dir / "hdr");
        for (std::size_t i = 0; i < dataset.test_hdr.size(); ++i)
            write_pfm(dir / "hdr" / (indexed_name("test", static_cast<int>(i)) + ".pfm"),
                      dataset.test_hdr[i]);
    }
    const fs::path manifest = dir / "manifest.json";
    write_manifest(dataset.manifest, manifest);
    return manifest;
}

Dataset load_dataset(const std::filesystem::path &manifest_path) {
    Dataset ds;
    ds.manifest = read_manifest(manifest_path);
    const auto base = manifest_path.parent_path();
    for (const ManifestView &v : ds.manifest.views) {
        ImageBuffer img = read_ppm(base / v.image);
        if (img.width != v.camera.width || img.height != v.camera.height)
            throw Error("image " + v.image + " does not match its camera size");
        if (img.channels != 3)
            throw Error("image " + v.image + " must be RGB");
        ds.images.push_back(std::move(img));
    }
    return ds;
}

}  // namespace nexf
