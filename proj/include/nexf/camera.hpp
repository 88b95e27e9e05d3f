// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <optional>
#include <utility>

namespace nexf {

using Vec3 = Eigen::Vector3d;

struct Aabb {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3 &p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
    // Grows every side by fraction * extent.
    Aabb expanded(double fraction) const;
    // Slab test; returns the entry/exit distances along a unit direction.
    std::optional<std::pair<double, double>> intersect(const Vec3 &origin,
                                                       const Vec3 &direction) const;
    bool operator==(const Aabb &) const = default;
};

// Pinhole camera. rotation maps camera axes (right, down, forward) to world;
// position is the camera center in world coordinates. Pixel (row, col) has
// its center at (col + 0.5, row + 0.5).
struct Camera {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Vec3 position = Vec3::Zero();
    double fx = 1.0, fy = 1.0, cx = 0.5, cy = 0.5;
    int width = 1, height = 1;

    // Throws Error on non-positive focal lengths or a non-orthonormal rotation.
    void validate() const;
    Vec3 forward() const { return rotation.col(2); }
    // Continuous pixel coordinates (u, v) = (x, y) of a world point, and its
    // depth along the forward axis.
    Eigen::Vector2d project(const Vec3 &world, double *depth = nullptr) const;

    static Camera look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double fov_y_deg,
                          int width, int height);

    bool operator==(const Camera &) const = default;
};

struct Pixel {
    int row = 0;
    int col = 0;
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
    double near = 0.0;
    double far = 1.0;
    Pixel pixel;
    int view_index = -1;
    double exposure = 1.0;

    Vec3 at(double t) const { return origin + t * direction; }
};

}  // namespace nexf
