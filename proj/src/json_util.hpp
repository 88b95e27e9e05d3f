// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/camera.hpp>
#include <nexf/param_store.hpp>

#include <json.hpp>

namespace nexf {

using Json = nlohmann::ordered_json;

inline Json vec3_to_json(const Vec3 &v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_from_json(const Json &j, const char *field) {
    if (!j.is_array() || j.size() != 3)
        throw Error(std::string("field '") + field + "' must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline Json camera_to_json(const Camera &c) {
    Json rot = Json::array();
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k)
            rot.push_back(c.rotation(r, k));
    return Json{{"rotation", rot},  {"position", vec3_to_json(c.position)},
                {"fx", c.fx},       {"fy", c.fy},
                {"cx", c.cx},       {"cy", c.cy},
                {"width", c.width}, {"height", c.height}};
}

inline Camera camera_from_json(const Json &j) {
    Camera c;
    const Json &rot = j.at("rotation");
    if (!rot.is_array() || rot.size() != 9)
        throw Error("camera rotation must hold 9 numbers (row-major)");
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 3; ++k)
            c.rotation(r, k) = rot[static_cast<std::size_t>(3 * r + k)].get<double>();
    c.position = vec3_from_json(j.at("position"), "position");
    c.fx = j.at("fx").get<double>();
    c.fy = j.at("fy").get<double>();
    c.cx = j.at("cx").get<double>();
    c.cy = j.at("cy").get<double>();
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    c.validate();
    return c;
}

}  // namespace nexf
