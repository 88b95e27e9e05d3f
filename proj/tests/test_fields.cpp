// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include <nexf/fields.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nexf;

namespace {

RadianceFieldConfig small_radiance(bool glo) {
    RadianceFieldConfig rc;
    rc.posenc_levels_x = 3;
    rc.posenc_levels_d = 2;
    rc.bottleneck_dim = 6;
    rc.pos_hidden = {16, 16};
    rc.view_hidden = {12, 12};
    rc.view_skip = true;
    rc.glo = glo;
    rc.glo_count = glo ? 3 : 0;
    return rc;
}

ExposureFieldConfig small_exposure() {
    ExposureFieldConfig ec;
    ec.hidden = {16, 16};
    return ec;
}

Model small_model(bool glo, std::uint64_t seed) {
    return init_model(small_radiance(glo), small_exposure(),
                      Aabb{Vec3::Constant(-1), Vec3::Constant(1)}, 8, seed);
}

Vec3 random_dir(Rng &rng) {
    return Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
}

Vec3 random_point(Rng &rng, double scale = 1.0) {
    return scale * Vec3(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
}

}  // namespace

TEST_CASE("profiles") {
    const auto ff = RadianceFieldConfig::profile(RadianceProfile::forward_facing);
    CHECK(ff.bottleneck_dim == 15);
    CHECK(ff.view_hidden == std::vector<int>{64, 64});
    CHECK_FALSE(ff.view_skip);
    const auto def = RadianceFieldConfig::profile(RadianceProfile::default_profile);
    CHECK(def.bottleneck_dim == 256);
    CHECK(def.view_hidden == std::vector<int>{256, 256, 256});
    CHECK(def.view_skip);
    CHECK(def.view_spec().output_dim() == 3);
    CHECK(def.pos_spec().output_dim() == 257);
    const ExposureFieldConfig ec;
    CHECK(ec.hidden == std::vector<int>{128, 128, 128, 128});
    CHECK(ec.spec().output_dim() == 1);
    CHECK(ec.spec().output == OutputActivation::softplus);
}

TEST_CASE("segment ownership") {
    const Model m = small_model(true, 1);
    for (const Segment &s : m.params.segments())
        CHECK(is_radiance_segment(s.name) == (s.name.rfind("radiance.", 0) == 0));
    CHECK(m.params.has(kGloScale));
    for (double v : m.params.view(kGloScale))
        CHECK(v == 0.0);
    for (double v : m.params.view(kGloShift))
        CHECK(v == 0.0);
}

TEST_CASE("exposure conditioning shifts the bottleneck by ln dt") {
    const Model m = small_model(false, 2);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const Vec3 x = random_point(rng), d = random_dir(rng);
        const auto one = radiance_forward(m.params, m.radiance, x, d, 1.0);
        const auto two = radiance_forward(m.params, m.radiance, x, d, 2.0);
        const auto e = radiance_forward(m.params, m.radiance, x, d, std::numbers::e);
        const double t1 = std::exp(rng.normal()), t2 = std::exp(rng.normal());
        const auto a = radiance_forward(m.params, m.radiance, x, d, t1);
        const auto b = radiance_forward(m.params, m.radiance, x, d, t2);
        for (std::size_t c = 0; c < one.bottleneck.size(); ++c) {
            CHECK(two.bottleneck[c] - one.bottleneck[c] == doctest::Approx(0.693147).epsilon(1e-6));
            CHECK(std::abs(two.bottleneck[c] - one.bottleneck[c] - std::log(2.0)) < 1e-12);
            CHECK(std::abs(e.bottleneck[c] - one.bottleneck[c] - 1.0) < 1e-12);
            CHECK(std::abs(a.bottleneck[c] - b.bottleneck[c] - (std::log(t1) - std::log(t2))) < 1e-12);
        }
        // Density ignores exposure.
        CHECK(one.sigma == two.sigma);
    }
}

TEST_CASE("dt = 1 equals the unconditioned forward") {
    // Unconditioned: run the two branches by hand with no addend.
    const Model m = small_model(false, 4);
    Rng rng(5);
    const Vec3 x = random_point(rng), d = random_dir(rng);
    const auto s = radiance_forward(m.params, m.radiance, x, d, 1.0);
    const std::vector<double> enc = posenc(std::span<const double>(x.data(), 3), 3);
    const auto pos = mlp_forward(m.params, kPosPrefix, m.radiance.pos_spec(), enc);
    std::vector<double> in(pos.begin(), pos.begin() + 6);
    const auto pd = posenc(std::span<const double>(d.data(), 3), 2);
    in.insert(in.end(), pd.begin(), pd.end());
    const auto c = mlp_forward(m.params, kViewPrefix, m.radiance.view_spec(), in);
    for (int a = 0; a < 3; ++a)
        CHECK(s.color(a) == doctest::Approx(c[static_cast<std::size_t>(a)]).epsilon(1e-14));
}

TEST_CASE("non-positive exposure is rejected") {
    const Model m = small_model(false, 6);
    CHECK_THROWS_AS(radiance_forward(m.params, m.radiance, Vec3::Zero(), Vec3::UnitZ(), 0.0), Error);
    CHECK_THROWS_AS(radiance_forward(m.params, m.radiance, Vec3::Zero(), Vec3::UnitZ(), -1.0), Error);
}

TEST_CASE("glo identity table is inert, trained table applies after conditioning") {
    Model m = small_model(true, 7);
    Rng rng(8);
    const Vec3 x = random_point(rng), d = random_dir(rng);
    const auto none = radiance_forward(m.params, m.radiance, x, d, 0.5);
    for (int g = 0; g < 3; ++g) {
        const auto with = radiance_forward(m.params, m.radiance, x, d, 0.5, g);
        CHECK(with.sigma == none.sigma);
        CHECK(with.color == none.color);
        CHECK(with.bottleneck == none.bottleneck);
    }
    for (double &v : m.params.view(kGloScale))
        v = 0.5 * rng.normal();
    for (double &v : m.params.view(kGloShift))
        v = 0.5 * rng.normal();
    const auto base = radiance_forward(m.params, m.radiance, x, d, 0.5);
    const auto g1 = radiance_forward(m.params, m.radiance, x, d, 0.5, 1);
    const auto sc = m.params.view(kGloScale), sh = m.params.view(kGloShift);
    for (std::size_t c = 0; c < 6; ++c)
        CHECK(std::abs(g1.bottleneck[c] - ((1 + sc[6 + c]) * base.bottleneck[c] + sh[6 + c])) < 1e-12);
    CHECK_THROWS_AS(radiance_forward(m.params, m.radiance, x, d, 0.5, 3), Error);
}

TEST_CASE("glo disabled ignores the index") {
    const Model m = small_model(false, 9);
    const auto a = radiance_forward(m.params, m.radiance, Vec3(0.1, 0.2, 0.3), Vec3::UnitY(), 1.5);
    const auto b = radiance_forward(m.params, m.radiance, Vec3(0.1, 0.2, 0.3), Vec3::UnitY(), 1.5, 0);
    CHECK(a.color == b.color);
}

TEST_CASE("batched, single-point, tape and reference forwards agree") {
    Model m = small_model(true, 10);
    Rng rng(11);
    for (double &v : m.params.view(kGloScale))
        v = 0.2 * rng.normal();
    const int n = 20;
    Mat x(n, 3), d(n, 3), le(n, 1);
    std::vector<int> glo(n);
    for (int i = 0; i < n; ++i) {
        const Vec3 p = random_point(rng, 1.5), v = random_dir(rng);
        x.row(i) = p.transpose();
        d.row(i) = v.transpose();
        le(i, 0) = rng.normal();
        glo[static_cast<std::size_t>(i)] = i % 3;
    }
    const RadianceBatch b = radiance_forward(m.params, m.radiance, x, d, le, glo);
    Tape tape;
    const RadianceVars tv = radiance_forward(tape, m.params, m.radiance, x, d, le, glo);
    for (int i = 0; i < n; ++i) {
        const Vec3 p = x.row(i).transpose(), v = d.row(i).transpose();
        const auto s = radiance_forward(m.params, m.radiance, p, v, std::exp(le(i, 0)), i % 3);
        const ref::Point r = ref::radiance(m.params, m.radiance, p.data(), v.data(), le(i, 0), i % 3, nullptr);
        CHECK(std::abs(s.sigma - b.sigma(i, 0)) < 1e-12);
        CHECK(std::abs(r.sigma - b.sigma(i, 0)) < 1e-12);
        CHECK(std::abs(tape.value(tv.sigma)(i, 0) - b.sigma(i, 0)) < 1e-12);
        for (int a = 0; a < 3; ++a) {
            CHECK(std::abs(s.color(a) - b.color(i, a)) < 1e-12);
            CHECK(std::abs(r.rgb[a] - b.color(i, a)) < 1e-12);
            CHECK(std::abs(tape.value(tv.color)(i, a) - b.color(i, a)) < 1e-12);
        }
    }
    const Mat e = exposure_forward(m.params, m.exposure, x);
    const Tape::Var te = exposure_forward(tape, m.params, m.exposure, x);
    for (int i = 0; i < n; ++i) {
        const Vec3 p = x.row(i).transpose();
        CHECK(std::abs(exposure_forward(m.params, m.exposure, p) - e(i, 0)) < 1e-12);
        CHECK(std::abs(ref::exposure(m.params, m.exposure, p.data(), nullptr) - e(i, 0)) < 1e-12);
        CHECK(std::abs(tape.value(te)(i, 0) - e(i, 0)) < 1e-12);
    }
}

TEST_CASE("output ranges over many random inputs") {
    const Model m = small_model(false, 12);
    Rng rng(13);
    const int n = 100000;
    Mat x(n, 3), d(n, 3), le(n, 1);
    for (int i = 0; i < n; ++i) {
        // Mix of in-bounds and far-out points.
        const double scale = i % 10 == 0 ? 100.0 : 1.0;
        x.row(i) = random_point(rng, scale).transpose();
        d.row(i) = random_dir(rng).transpose();
        le(i, 0) = 3.0 * rng.normal();
    }
    const Mat e = exposure_forward(m.params, m.exposure, x);
    CHECK((e.array() > 0.0).all());
    CHECK(e.allFinite());
    const RadianceBatch b = radiance_forward(m.params, m.radiance, x, d, le);
    CHECK((b.sigma.array() >= 0.0).all());
    CHECK((b.color.array() >= 0.0).all());
    CHECK((b.color.array() <= 1.0).all());
}

TEST_CASE("exposure field special cases") {
    Model m = small_model(false, 14);
    for (const Segment &s : m.params.segments())
        if (s.name.rfind(kExposurePrefix, 0) == 0)
            for (double &v : m.params.view(s.name))
                v = 0.0;
    const std::string last_bias = "exposure.b" + std::to_string(m.exposure.spec().num_layers() - 1);
    m.params.view(last_bias)[0] = 0.7;
    Rng rng(15);
    const double expect = std::log1p(std::exp(0.7));
    for (int i = 0; i < 20; ++i) {
        const Vec3 x = random_point(rng, 3.0), eps = 0.05 * Vec3(rng.normal(), rng.normal(), rng.normal());
        CHECK(exposure_forward(m.params, m.exposure, x) == doctest::Approx(expect).epsilon(1e-15));
        CHECK(exposure_diff(m.params, m.exposure, x, eps) == 0.0);
    }
}

TEST_CASE("exposure_diff") {
    const Model m = small_model(false, 16);
    Rng rng(17);
    for (int i = 0; i < 20; ++i) {
        const Vec3 x = random_point(rng), eps = 0.05 * Vec3(rng.normal(), rng.normal(), rng.normal());
        CHECK(exposure_diff(m.params, m.exposure, x, Vec3::Zero()) == 0.0);
        const double a = exposure_forward(m.params, m.exposure, x);
        const double b = exposure_forward(m.params, m.exposure, Vec3(x + eps));
        CHECK(exposure_diff(m.params, m.exposure, x, eps) == doctest::Approx((a - b) * (a - b)).epsilon(1e-12));
    }

    // Nearly linear field: one always-active hidden unit carrying a.x, output
    // softplus(a.x + 50) = a.x + 50 up to ~1e-22.
    ExposureFieldConfig ec;
    ec.posenc_levels = 0;
    ec.hidden = {1};
    ParamStore store;
    register_exposure_field(store, ec);
    const Vec3 a(0.3, -1.2, 0.8);
    auto w0 = store.view("exposure.w0");
    for (int k = 0; k < 3; ++k)
        w0[static_cast<std::size_t>(k)] = a(k);
    store.view("exposure.b0")[0] = 100.0;
    store.view("exposure.w1")[0] = 1.0;
    store.view("exposure.b1")[0] = -50.0;
    for (int i = 0; i < 20; ++i) {
        const Vec3 x = random_point(rng), eps = 0.05 * Vec3(rng.normal(), rng.normal(), rng.normal());
        const double closed = std::pow(a.dot(eps), 2);
        CHECK(std::abs(exposure_diff(store, ec, x, eps) - closed) < 1e-11);
    }
}
