// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include <nexf/checkpoint_io.hpp>
#include <nexf/trainer.hpp>

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace nexf;

namespace {

const std::vector<double> kExposures{1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0, 2.0};

struct Tiny {
    Dataset data;
    RadianceFieldConfig radiance;
    ExposureFieldConfig exposure;
    TrainConfig train;
};

Tiny tiny(bool glo = false, const SceneField &scene = two_region_scene()) {
    RigConfig rig;
    rig.train_views = 4;
    rig.test_views = 1;
    rig.width = 10;
    rig.height = 8;
    DatasetOptions opt;
    opt.gt_samples = 32;
    Tiny t{build_dataset(scene, rig_train_cameras(rig), rig_test_cameras(rig), kExposures, 3, opt),
           {}, {}, {}};
    t.radiance.posenc_levels_x = 2;
    t.radiance.posenc_levels_d = 1;
    t.radiance.bottleneck_dim = 4;
    t.radiance.pos_hidden = {16};
    t.radiance.view_hidden = {8, 8};
    t.radiance.glo = glo;
    t.exposure.posenc_levels = 2;
    t.exposure.hidden = {8};
    t.train.iterations = 6;
    t.train.rays_per_batch = 16;
    t.train.samples_per_ray = 6;
    t.train.warmup = 2;
    t.train.seed = 11;
    return t;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void set_constant_exposure(Model &m, double k) {
    for (const Segment &s : m.params.segments())
        if (s.name.rfind(kExposurePrefix, 0) == 0)
            for (double &v : m.params.view(s.name))
                v = 0.0;
    // softplus(b) = k
    m.params.view("exposure.b" + std::to_string(m.exposure.spec().num_layers() - 1))[0] =
        std::log(std::expm1(k));
}

}  // namespace

TEST_CASE("iteration defaults") {
    CHECK(TrainConfig::forward_facing().iterations == 10000);
    CHECK(TrainConfig::room_scale().iterations == 25000);
    const TrainConfig t;
    CHECK(t.lr_max == 5e-3);
    CHECK(t.lr_min == 5e-4);
    CHECK(t.warmup == 200);
    CHECK(t.reg_noise == 0.05);
    TrainConfig bad;
    bad.rays_per_batch = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("zero iterations returns the initialization") {
    Tiny t = tiny();
    t.train.iterations = 0;
    const Checkpoint init = init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest);
    std::vector<LossRecord> trace;
    const Checkpoint out = train(t.data, init, &trace);
    CHECK(trace.empty());
    CHECK(out.model == init.model);
    CHECK(out.iteration == 0);
    CHECK(out.optimizer.steps() == 0);
}

TEST_CASE("training is deterministic and the loss decomposes exactly") {
    Tiny t = tiny(true);
    std::vector<LossRecord> a, b;
    const Checkpoint x = train(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest), &a);
    const Checkpoint y = train(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest), &b);
    CHECK(x.model == y.model);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].iteration == static_cast<std::int64_t>(i));
        CHECK(a[i].total == a[i].photometric + a[i].exposure);
        CHECK(a[i].total == b[i].total);
        CHECK(std::isfinite(a[i].total));
    }
    CHECK(x.model.params.data() != init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest).model.params.data());

    Tiny other = tiny(true);
    other.train.seed = 12;
    const Checkpoint z = train(other.data, init_checkpoint(other.radiance, other.exposure, other.train, other.data.manifest));
    CHECK(z.model.params.data() != x.model.params.data());
}

TEST_CASE("checkpoint round trip is bit exact") {
    Tiny t = tiny(true);
    const Checkpoint c = train(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest));
    const auto dir = testing::scratch_dir("ckpt");
    save_checkpoint(dir / "a.nexf", c);
    const Checkpoint l = load_checkpoint(dir / "a.nexf");
    CHECK(l.model == c.model);
    CHECK(l.train == c.train);
    CHECK(l.iteration == c.iteration);
    CHECK(l.optimizer.steps() == c.optimizer.steps());
    CHECK(l.optimizer.first_moment() == c.optimizer.first_moment());
    CHECK(l.optimizer.second_moment() == c.optimizer.second_moment());
    CHECK(l.sampling == c.sampling);
    CHECK(l.jitter == c.jitter);
    CHECK(l.noise == c.noise);
    save_checkpoint(dir / "b.nexf", l);
    CHECK(slurp(dir / "a.nexf") == slurp(dir / "b.nexf"));

    const Camera cam = t.data.manifest.views[0].camera;
    CHECK(render_view(c.model, cam, RenderMode::nexf()) == render_view(l.model, cam, RenderMode::nexf()));
    CHECK(render_view(c.model, cam, RenderMode::at_exposure(0.5)) ==
          render_view(l.model, cam, RenderMode::at_exposure(0.5)));

    std::ofstream(dir / "junk.nexf") << "not a checkpoint";
    CHECK_THROWS_AS(load_checkpoint(dir / "junk.nexf"), Error);
}

TEST_CASE("resuming from a checkpoint matches an uninterrupted run") {
    Tiny t = tiny();
    const Checkpoint straight = train(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest));

    Checkpoint first = init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest);
    {
        Trainer tr(t.data, std::move(first));
        for (int i = 0; i < 3; ++i)
            tr.step();
        first = tr.release();
    }
    const auto dir = testing::scratch_dir("resume");
    save_checkpoint(dir / "mid.nexf", first);
    const Checkpoint resumed = train(t.data, load_checkpoint(dir / "mid.nexf"));
    CHECK(resumed.iteration == 6);
    CHECK(resumed.model == straight.model);
    CHECK(resumed.optimizer.first_moment() == straight.optimizer.first_moment());
}

TEST_CASE("batches condition on input exposures") {
    Tiny t = tiny(true);
    Trainer tr(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest));
    const RayBatch b = tr.sample_batch();
    CHECK(b.samples.num_rays == 16);
    CHECK(b.samples.num_samples == 6);
    CHECK(b.glo_index.size() == 16u * 6u);
    const auto train_views = t.data.manifest.indices("train");
    for (int r = 0; r < 16; ++r) {
        const int g = b.glo_index[static_cast<std::size_t>(r) * 6];
        REQUIRE(g >= 0);
        REQUIRE(g < static_cast<int>(train_views.size()));
        CHECK(b.exposure(r, 0) == t.data.manifest.views[train_views[static_cast<std::size_t>(g)]].exposure);
        for (int a = 0; a < 3; ++a) {
            CHECK(b.gt_color(r, a) >= 0.0);
            CHECK(b.gt_color(r, a) <= 1.0);
        }
    }
    // Noise is N(0, 0.05^2) per component.
    double ss = 0.0;
    for (Index i = 0; i < b.noise.size(); ++i)
        ss += b.noise.data()[i] * b.noise.data()[i];
    const double sd = std::sqrt(ss / static_cast<double>(b.noise.size()));
    CHECK(sd > 0.035);
    CHECK(sd < 0.065);
}

TEST_CASE("photometric loss never reaches the exposure field during training") {
    Tiny t = tiny(true);
    Trainer tr(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest));
    const RayBatch b = tr.sample_batch();
    const Model &m = tr.checkpoint().model;
    Tape tape;
    const LossGraph g = build_training_loss(tape, m, t.train.weights, b);
    const std::vector<double> grad = tape.gradient(g.photometric, m.params.size());
    bool theta_moves = false;
    for (const Segment &s : m.params.segments())
        for (std::size_t i = s.offset; i < s.offset + s.size(); ++i) {
            if (is_radiance_segment(s.name))
                theta_moves = theta_moves || grad[i] != 0.0;
            else
                CHECK(grad[i] == 0.0);
        }
    CHECK(theta_moves);
}

TEST_CASE("render modes coincide for a constant exposure field") {
    Tiny t = tiny();
    Checkpoint c = train(t.data, init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest));
    set_constant_exposure(c.model, 0.37);
    const Camera cam = t.data.manifest.views[1].camera;
    const ImageBuffer fixed = render_view(c.model, cam, RenderMode::at_exposure(0.37));
    const ImageBuffer point = render_view(c.model, cam, RenderMode::nexf());
    c.model.conditioning = TestConditioning::per_pixel;
    const ImageBuffer pixel = render_view(c.model, cam, RenderMode::nexf());
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < fixed.data.size(); ++i) {
        e1 = std::max(e1, std::abs(point.data[i] - fixed.data[i]));
        e2 = std::max(e2, std::abs(pixel.data[i] - fixed.data[i]));
    }
    CHECK(e1 < 1e-12);
    CHECK(e2 < 1e-12);
    CHECK_THROWS_AS(render_view(c.model, cam, RenderMode::at_exposure(0.0)), Error);

    // Opaque scene: the exposure map is the constant.
    const ImageBuffer map = export_exposure_map(c.model, cam);
    CHECK(map.channels == 1);
    for (double v : map.data)
        CHECK(v <= 0.37 + 1e-12);
}

TEST_CASE("exposure map of an opaque model equals the constant") {
    Tiny t = tiny();
    Checkpoint c = init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest);
    set_constant_exposure(c.model, 0.8);
    // Huge density everywhere: raise the raw density bias.
    const std::string last = "radiance.pos.b" + std::to_string(c.model.radiance.pos_spec().num_layers() - 1);
    c.model.params.view(last)[static_cast<std::size_t>(c.model.radiance.bottleneck_dim)] = 200.0;
    const Camera cam = t.data.manifest.views[0].camera;
    const ImageBuffer map = export_exposure_map(c.model, cam);
    const auto rays = generate_rays(cam, all_pixels(cam), c.model.bounds);
    int opaque = 0;
    for (std::size_t i = 0; i < rays.size(); ++i) {
        CHECK(map.data[i] <= 0.8 + 1e-12);
        // Rays that only graze a corner of the bounds see little density.
        if (rays[i].far - rays[i].near > 0.5) {
            CHECK(std::abs(map.data[i] - 0.8) < 1e-12);
            ++opaque;
        }
    }
    CHECK(opaque > 40);
}

TEST_CASE("an empty scene renders black") {
    Tiny t = tiny();
    Checkpoint c = init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest);
    const std::string last = "radiance.pos.b" + std::to_string(c.model.radiance.pos_spec().num_layers() - 1);
    const std::string lastw = "radiance.pos.w" + std::to_string(c.model.radiance.pos_spec().num_layers() - 1);
    // Zero the density column and push its bias far negative: softplus(-800) underflows to 0.
    const Index k = c.model.radiance.bottleneck_dim;
    auto w = c.model.params.view(lastw);
    for (std::size_t i = static_cast<std::size_t>(k); i < w.size(); i += static_cast<std::size_t>(k + 1))
        w[i] = 0.0;
    c.model.params.view(last)[static_cast<std::size_t>(k)] = -800.0;
    const Camera cam = t.data.manifest.views[0].camera;
    for (const RenderMode mode : {RenderMode::nexf(), RenderMode::at_exposure(1.0)})
        for (double v : render_view(c.model, cam, mode).data)
            CHECK(v == 0.0);
    for (double v : export_exposure_map(c.model, cam).data)
        CHECK(v == 0.0);

    // Training on an empty analytic scene stays finite.
    Tiny e = tiny(false, SceneField{});
    const Checkpoint trained = train(e.data, init_checkpoint(e.radiance, e.exposure, e.train, e.data.manifest));
    for (double v : trained.model.params.data())
        CHECK(std::isfinite(v));
}

TEST_CASE("loss csv") {
    const auto dir = testing::scratch_dir("losscsv");
    write_loss_csv(dir / "empty.csv", {});
    CHECK(slurp(dir / "empty.csv") == "iteration,L_f,L_e,total\n");
    write_loss_csv(dir / "one.csv", {LossRecord{0, 0.5, 0.25, 0.75}});
    CHECK(slurp(dir / "one.csv") == "iteration,L_f,L_e,total\n0,0.5,0.25,0.75\n");
}

TEST_CASE("non-finite losses abort with the iteration") {
    Tiny t = tiny();
    Checkpoint c = init_checkpoint(t.radiance, t.exposure, t.train, t.data.manifest);
    c.model.params.view("radiance.view.b0")[0] = std::numeric_limits<double>::quiet_NaN();
    Trainer tr(t.data, std::move(c));
    try {
        tr.step();
        FAIL("expected a divergence error");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
    }
}
