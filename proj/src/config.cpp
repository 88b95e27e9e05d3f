// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "config_json.hpp"

#include <fstream>
#include <sstream>

namespace nexf {

namespace {

RadianceProfile profile_from_name(const std::string &name, const std::string &where) {
    if (name == "default")
        return RadianceProfile::default_profile;
    if (name == "forward_facing")
        return RadianceProfile::forward_facing;
    throw ConfigError("field '" + where + "' must be \"default\" or \"forward_facing\"");
}

Json texture_to_json(const Texture &t) {
    return Json{{"amplitude", t.amplitude},
                {"frequency", vec3_to_json(t.frequency)},
                {"phase", vec3_to_json(t.phase)}};
}

Vec3 vec3_field(Fields &f, const char *key, const Vec3 &fallback) {
    const Json *j = f.sub(key);
    if (!j)
        return fallback;
    const std::string where = f.path(key);
    try {
        return vec3_from_json(*j, where.c_str());
    } catch (const Json::exception &) {
        throw ConfigError("field '" + where + "' must be an array of 3 numbers");
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
}

Json primitive_to_json(const Primitive &p) {
    return Json{{"shape", p.shape == ShapeKind::box ? "box" : "sphere"},
                {"center", vec3_to_json(p.center)},
                {"size", vec3_to_json(p.size)},
                {"density", p.density},
                {"radiance", vec3_to_json(p.radiance)},
                {"texture", texture_to_json(p.texture)}};
}

Primitive primitive_from_json(const Json &j, const std::string &where) {
    Fields f(j, where);
    Primitive p;
    std::string shape = "box";
    f.opt("shape", shape);
    if (shape == "box")
        p.shape = ShapeKind::box;
    else if (shape == "sphere")
        p.shape = ShapeKind::sphere;
    else
        throw ConfigError("field '" + f.path("shape") + "' must be \"box\" or \"sphere\"");
    p.center = vec3_field(f, "center", p.center);
    p.size = vec3_field(f, "size", p.size);
    f.opt("density", p.density);
    p.radiance = vec3_field(f, "radiance", p.radiance);
    if (const Json *t = f.sub("texture")) {
        Fields tf(*t, f.path("texture"));
        tf.opt("amplitude", p.texture.amplitude);
        p.texture.frequency = vec3_field(tf, "frequency", p.texture.frequency);
        p.texture.phase = vec3_field(tf, "phase", p.texture.phase);
        tf.done();
    }
    f.done();
    return p;
}

Json scene_to_json(const SceneConfig &s) {
    Json j{{"preset", s.preset}};
    if (s.preset == "custom") {
        Json prims = Json::array();
        for (const Primitive &p : s.field.primitives)
            prims.push_back(primitive_to_json(p));
        j["primitives"] = prims;
        j["background"] = vec3_to_json(s.field.background);
    }
    j["rig"] = Json{{"train_views", s.rig.train_views},
                    {"test_views", s.rig.test_views},
                    {"width", s.rig.width},
                    {"height", s.rig.height},
                    {"radius", s.rig.radius},
                    {"fov_y_deg", s.rig.fov_y_deg},
                    {"azimuth_span_deg", s.rig.azimuth_span_deg}};
    j["exposure_set"] = s.exposure_set;
    j["gamma"] = s.capture.gamma;
    j["gt_samples"] = s.capture.gt_samples;
    return j;
}

SceneConfig scene_from_json(const Json &j) {
    Fields f(j, "scene");
    SceneConfig s;
    f.opt("preset", s.preset);
    if (s.preset == "two_region") {
        s.field = two_region_scene();
        if (f.sub("primitives") || f.sub("background"))
            throw ConfigError("field 'scene.primitives' requires \"preset\": \"custom\"");
    } else if (s.preset == "custom") {
        const Json *prims = f.sub("primitives");
        if (!prims)
            throw ConfigError("missing field 'scene.primitives' for a custom scene");
        if (!prims->is_array())
            throw ConfigError("field 'scene.primitives' must be an array");
        s.field.primitives.clear();
        for (std::size_t i = 0; i < prims->size(); ++i)
            s.field.primitives.push_back(
                primitive_from_json((*prims)[i], "scene.primitives[" + std::to_string(i) + "]"));
        s.field.background = vec3_field(f, "background", Vec3::Zero());
    } else {
        throw ConfigError("field 'scene.preset' must be \"two_region\" or \"custom\"");
    }
    if (const Json *rig = f.sub("rig")) {
        Fields rf(*rig, "scene.rig");
        rf.opt("train_views", s.rig.train_views);
        rf.opt("test_views", s.rig.test_views);
        rf.opt("width", s.rig.width);
        rf.opt("height", s.rig.height);
        rf.opt("radius", s.rig.radius);
        rf.opt("fov_y_deg", s.rig.fov_y_deg);
        rf.opt("azimuth_span_deg", s.rig.azimuth_span_deg);
        rf.done();
    }
    f.opt("exposure_set", s.exposure_set);
    f.opt("gamma", s.capture.gamma);
    f.opt("gt_samples", s.capture.gt_samples);
    f.done();
    return s;
}

void check(bool ok, const std::string &msg) {
    if (!ok)
        throw ConfigError(msg);
}

}  // namespace

std::string profile_name(RadianceProfile p) {
    return p == RadianceProfile::forward_facing ? "forward_facing" : "default";
}

std::string conditioning_name(TestConditioning c) {
    return c == TestConditioning::per_pixel ? "per_pixel" : "per_point";
}

TestConditioning conditioning_from_name(const std::string &name) {
    if (name == "per_point")
        return TestConditioning::per_point;
    if (name == "per_pixel")
        return TestConditioning::per_pixel;
    throw ConfigError("field 'conditioning' must be \"per_point\" or \"per_pixel\"");
}

Json radiance_to_json(const RadianceFieldConfig &cfg, RadianceProfile profile,
                      bool with_glo_count) {
    Json j{{"profile", profile_name(profile)},
           {"posenc_levels_x", cfg.posenc_levels_x},
           {"posenc_levels_d", cfg.posenc_levels_d},
           {"bottleneck_dim", cfg.bottleneck_dim},
           {"pos_hidden", cfg.pos_hidden},
           {"view_hidden", cfg.view_hidden},
           {"view_skip", cfg.view_skip},
           {"glo", cfg.glo}};
    if (with_glo_count)
        j["glo_count"] = cfg.glo_count;
    return j;
}

RadianceFieldConfig radiance_from_json(const Json &j, const std::string &where,
                                       RadianceProfile *profile) {
    Fields f(j, where);
    std::string name = "default";
    f.opt("profile", name);
    const RadianceProfile p = profile_from_name(name, f.path("profile"));
    if (profile)
        *profile = p;
    RadianceFieldConfig cfg = RadianceFieldConfig::profile(p);
    f.opt("posenc_levels_x", cfg.posenc_levels_x);
    f.opt("posenc_levels_d", cfg.posenc_levels_d);
    f.opt("bottleneck_dim", cfg.bottleneck_dim);
    f.opt("pos_hidden", cfg.pos_hidden);
    f.opt("view_hidden", cfg.view_hidden);
    f.opt("view_skip", cfg.view_skip);
    f.opt("glo", cfg.glo);
    f.opt("glo_count", cfg.glo_count);
    f.done();
    return cfg;
}

Json exposure_field_to_json(const ExposureFieldConfig &cfg) {
    return Json{{"posenc_levels", cfg.posenc_levels}, {"hidden", cfg.hidden}};
}

ExposureFieldConfig exposure_field_from_json(const Json &j, const std::string &where) {
    Fields f(j, where);
    ExposureFieldConfig cfg;
    f.opt("posenc_levels", cfg.posenc_levels);
    f.opt("hidden", cfg.hidden);
    f.done();
    return cfg;
}

Json train_to_json(const TrainConfig &cfg) {
    return Json{{"iterations", cfg.iterations},   {"rays_per_batch", cfg.rays_per_batch},
                {"samples_per_ray", cfg.samples_per_ray}, {"lr_max", cfg.lr_max},
                {"lr_min", cfg.lr_min},           {"warmup", cfg.warmup},
                {"reg_noise", cfg.reg_noise}};
}

void train_from_json(const Json &j, const std::string &where, TrainConfig &cfg) {
    Fields f(j, where);
    f.opt("iterations", cfg.iterations);
    f.opt("rays_per_batch", cfg.rays_per_batch);
    f.opt("samples_per_ray", cfg.samples_per_ray);
    f.opt("lr_max", cfg.lr_max);
    f.opt("lr_min", cfg.lr_min);
    f.opt("warmup", cfg.warmup);
    f.opt("reg_noise", cfg.reg_noise);
    f.done();
}

Json weights_to_json(const WeightConfig &cfg) {
    return Json{{"sigma_exp", cfg.sigma_exp},
                {"lambda_exp", cfg.lambda_exp},
                {"lambda_sat", cfg.lambda_sat},
                {"sat_floor", cfg.sat_floor},
                {"reg_weight", cfg.reg_weight}};
}

WeightConfig weights_from_json(const Json &j, const std::string &where) {
    Fields f(j, where);
    WeightConfig cfg;
    f.opt("sigma_exp", cfg.sigma_exp);
    f.opt("lambda_exp", cfg.lambda_exp);
    f.opt("lambda_sat", cfg.lambda_sat);
    f.opt("sat_floor", cfg.sat_floor);
    f.opt("reg_weight", cfg.reg_weight);
    f.done();
    return cfg;
}

Json fusion_to_json(const FusionConfig &cfg) {
    return Json{{"contrast", cfg.contrast},
                {"saturation", cfg.saturation},
                {"well_exposedness", cfg.well_exposedness},
                {"sigma", cfg.sigma},
                {"levels", cfg.levels}};
}

FusionConfig fusion_from_json(const Json &j, const std::string &where) {
    Fields f(j, where);
    FusionConfig cfg;
    f.opt("contrast", cfg.contrast);
    f.opt("saturation", cfg.saturation);
    f.opt("well_exposedness", cfg.well_exposedness);
    f.opt("sigma", cfg.sigma);
    f.opt("levels", cfg.levels);
    f.done();
    return cfg;
}

void RunConfig::validate() const {
    try {
        scene.field.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(std::string("scene: ") + e.what());
    }
    check(!scene.field.primitives.empty(), "field 'scene.primitives' must not be empty");
    check(scene.rig.train_views >= 1, "field 'scene.rig.train_views' must be >= 1");
    check(scene.rig.test_views >= 0, "field 'scene.rig.test_views' must be >= 0");
    check(scene.rig.width >= 1 && scene.rig.height >= 1,
          "fields 'scene.rig.width' and 'scene.rig.height' must be >= 1");
    check(scene.rig.radius > 0.0, "field 'scene.rig.radius' must be positive");
    check(scene.rig.fov_y_deg > 0.0 && scene.rig.fov_y_deg < 180.0,
          "field 'scene.rig.fov_y_deg' must lie in (0, 180)");
    check(!scene.exposure_set.empty(), "field 'scene.exposure_set' must not be empty");
    for (double e : scene.exposure_set)
        check(e > 0.0, "field 'scene.exposure_set' must hold positive exposures");
    check(scene.capture.gamma > 0.0, "field 'scene.gamma' must be positive");
    check(scene.capture.gt_samples >= 1, "field 'scene.gt_samples' must be >= 1");
    check(seed == train.seed, "train seed does not match 'seed'");
    try {
        radiance.validate();
        exposure.validate();
        train.validate();
        fusion.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_run_config(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error &e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Fields f(doc, "");
    RunConfig cfg;
    const Json *scene = f.sub("scene");
    if (!scene)
        throw ConfigError("missing required field 'scene'");
    cfg.scene = scene_from_json(*scene);
    if (const Json *r = f.sub("radiance_field"))
        cfg.radiance = radiance_from_json(*r, "radiance_field", &cfg.profile);
    if (const Json *e = f.sub("exposure_field"))
        cfg.exposure = exposure_field_from_json(*e, "exposure_field");
    if (const Json *t = f.sub("train"))
        train_from_json(*t, "train", cfg.train);
    if (const Json *w = f.sub("weights"))
        cfg.train.weights = weights_from_json(*w, "weights");
    if (const Json *u = f.sub("fusion"))
        cfg.fusion = fusion_from_json(*u, "fusion");
    std::string cond = conditioning_name(cfg.conditioning);
    f.opt("conditioning", cond);
    cfg.conditioning = conditioning_from_name(cond);
    f.opt("output_dir", cfg.output_dir);
    f.opt("seed", cfg.seed);
    f.done();
    cfg.train.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string dump_run_config(const RunConfig &cfg) {
    const Json doc{{"scene", scene_to_json(cfg.scene)},
                   {"radiance_field", radiance_to_json(cfg.radiance, cfg.profile, false)},
                   {"exposure_field", exposure_field_to_json(cfg.exposure)},
                   {"train", train_to_json(cfg.train)},
                   {"weights", weights_to_json(cfg.train.weights)},
                   {"fusion", fusion_to_json(cfg.fusion)},
                   {"conditioning", conditioning_name(cfg.conditioning)},
                   {"output_dir", cfg.output_dir},
                   {"seed", cfg.seed}};
    return doc.dump(2) + "\n";
}

}  // namespace nexf
