// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/param_store.hpp>
#include <nexf/renderer.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nexf {

Aabb Aabb::expanded(double fraction) const {
    const Vec3 pad = fraction * extent();
    return Aabb{lo - pad, hi + pad};
}

std::optional<std::pair<double, double>> Aabb::intersect(const Vec3 &origin,
                                                         const Vec3 &direction) const {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(direction[a]) < 1e-15) {
            if (origin[a] < lo[a] || origin[a] > hi[a])
                return std::nullopt;
            continue;
        }
        double ta = (lo[a] - origin[a]) / direction[a];
        double tb = (hi[a] - origin[a]) / direction[a];
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t1 <= std::max(t0, 0.0))
        return std::nullopt;
    return std::make_pair(t0, t1);
}

void Camera::validate() const {
    if (!(fx > 0) || !(fy > 0))
        throw Error("camera focal lengths must be positive");
    if (width < 1 || height < 1)
        throw Error("camera image size must be positive");
    const double err = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).norm();
    if (!(err <= 1e-9))
        throw Error("camera rotation is not orthonormal");
}

Eigen::Vector2d Camera::project(const Vec3 &world, double *depth) const {
    const Vec3 p = rotation.transpose() * (world - position);
    if (depth)
        *depth = p.z();
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
}

Camera Camera::look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double fov_y_deg,
                       int width, int height) {
    const Vec3 f = (target - eye).normalized();
    const Vec3 r = f.cross(up).normalized();
    const Vec3 d = f.cross(r);
    Camera cam;
    cam.rotation.col(0) = r;
    cam.rotation.col(1) = d;
    cam.rotation.col(2) = f;
    cam.position = eye;
    cam.width = width;
    cam.height = height;
    cam.fy = 0.5 * height / std::tan(0.5 * fov_y_deg * M_PI / 180.0);
    cam.fx = cam.fy;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    return cam;
}

std::pair<double, double> ray_bounds(const Vec3 &origin, const Vec3 &direction,
                                     const Aabb &bounds) {
    constexpr double kMinNear = 1e-6;
    if (auto hit = bounds.intersect(origin, direction)) {
        const double near = std::max(hit->first, kMinNear);
        if (hit->second > near)
            return {near, hit->second};
    }
    const double radius = 0.5 * bounds.extent().norm();
    const double dist = (bounds.center() - origin).norm();
    const double near = std::max(dist - radius, kMinNear);
    return {near, std::max(dist + radius, near + radius)};
}

std::vector<Pixel> all_pixels(const Camera &camera) {
    std::vector<Pixel> pixels;
    pixels.reserve(static_cast<std::size_t>(camera.width) * camera.height);
    for (int r = 0; r < camera.height; ++r)
        for (int c = 0; c < camera.width; ++c)
            pixels.push_back({r, c});
    return pixels;
}

std::vector<Ray> generate_rays(const Camera &camera, std::span<const Pixel> pixels,
                               const Aabb &bounds) {
    std::vector<Ray> rays;
    rays.reserve(pixels.size());
    for (const Pixel &px : pixels) {
        if (px.row < 0 || px.row >= camera.height || px.col < 0 || px.col >= camera.width)
            throw Error("generate_rays: pixel outside the image");
        const Vec3 local((px.col + 0.5 - camera.cx) / camera.fx,
                         (px.row + 0.5 - camera.cy) / camera.fy, 1.0);
        Ray ray;
        ray.origin = camera.position;
        ray.direction = (camera.rotation * local).normalized();
        ray.pixel = px;
        std::tie(ray.near, ray.far) = ray_bounds(ray.origin, ray.direction, bounds);
        rays.push_back(ray);
    }
    return rays;
}

RaySamples sample_stratified(std::span<const Ray> rays, int num_samples, Rng *jitter) {
    if (num_samples < 1)
        throw Error("sample_stratified: need at least one sample per ray");
    const auto R = static_cast<Index>(rays.size());
    const Index S = num_samples;
    RaySamples out;
    out.num_rays = static_cast<int>(R);
    out.num_samples = num_samples;
    out.t.resize(R, S);
    out.deltas.resize(R, S);
    out.positions.resize(R * S, 3);
    out.directions.resize(R * S, 3);
    for (Index r = 0; r < R; ++r) {
        const Ray &ray = rays[static_cast<std::size_t>(r)];
        const double bin = (ray.far - ray.near) / static_cast<double>(S);
        for (Index s = 0; s < S; ++s) {
            const double u = jitter ? jitter->uniform() : 0.5;
            out.t(r, s) = ray.near + (static_cast<double>(s) + u) * bin;
        }
        for (Index s = 0; s < S; ++s) {
            out.deltas(r, s) = s + 1 < S ? out.t(r, s + 1) - out.t(r, s) : bin;
            out.positions.row(r * S + s) = ray.at(out.t(r, s)).transpose();
            out.directions.row(r * S + s) = ray.direction.transpose();
        }
    }
    return out;
}

Rgb composite_color(RaySampleBatch &batch) {
    const std::size_t n = batch.sigma.size();
    if (batch.delta.size() != n || batch.color.size() != n)
        throw Error("composite_color: sigma, delta and color lengths differ");
    batch.alpha.assign(n, 0.0);
    batch.transmittance.assign(n, 0.0);
    batch.weights.assign(n, 0.0);
    Rgb out{0.0, 0.0, 0.0};
    double tau = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double alpha = 1.0 - std::exp(-batch.sigma[j] * batch.delta[j]);
        batch.alpha[j] = alpha;
        batch.transmittance[j] = tau;
        batch.weights[j] = tau * alpha;
        for (int c = 0; c < 3; ++c)
            out[c] += batch.weights[j] * batch.color[j][c];
        tau *= 1.0 - alpha;
    }
    batch.weights_cached = true;
    return out;
}

namespace {

double frozen_weighted_sum(const RaySampleBatch &batch, const std::vector<double> &values,
                           const char *what) {
    if (!batch.weights_cached)
        throw Error(std::string(what) + ": compositing weights not cached; run composite_color");
    if (values.size() != batch.weights.size())
        throw Error(std::string(what) + ": value count does not match the sample count");
    double out = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        out += batch.weights[j] * values[j];
    return out;
}

}  // namespace

double composite_exposure(const RaySampleBatch &batch) {
    return frozen_weighted_sum(batch, batch.exposure, "composite_exposure");
}

double composite_reg(const RaySampleBatch &batch) {
    return frozen_weighted_sum(batch, batch.reg_diff, "composite_reg");
}

Mat compositing_weights(const Mat &sigma, const Mat &deltas) {
    if (sigma.rows() != deltas.rows() || sigma.cols() != deltas.cols())
        throw Error("compositing_weights: sigma and delta shapes differ");
    Mat w(sigma.rows(), sigma.cols());
    for (Index r = 0; r < sigma.rows(); ++r) {
        double tau = 1.0;
        for (Index s = 0; s < sigma.cols(); ++s) {
            const double alpha = 1.0 - std::exp(-sigma(r, s) * deltas(r, s));
            w(r, s) = tau * alpha;
            tau *= 1.0 - alpha;
        }
    }
    return w;
}

Mat composite(const Mat &weights, const Mat &values) {
    const Index R = weights.rows(), S = weights.cols();
    if (values.rows() != R * S)
        throw Error("composite: values must hold one row per sample");
    Mat out = Mat::Zero(R, values.cols());
    for (Index r = 0; r < R; ++r)
        for (Index s = 0; s < S; ++s)
            out.row(r) += weights(r, s) * values.row(r * S + s);
    return out;
}

Tape::Var compositing_weights(Tape &tape, Tape::Var sigma, const Mat &deltas) {
    Tape::Var delta = tape.constant(deltas);
    Tape::Var optical = tape.mul(sigma, delta);
    // alpha = 1 - exp(-sigma delta), tau = exp(-sum_{k<j} sigma_k delta_k)
    Tape::Var alpha = tape.shift(tape.scale(tape.exp(tape.scale(optical, -1.0)), -1.0), 1.0);
    Tape::Var tau = tape.exp(tape.scale(tape.cumsum_exclusive_rows(optical), -1.0));
    return tape.mul(tau, alpha);
}

}  // namespace nexf
