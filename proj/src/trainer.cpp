// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/trainer.hpp>

#include <nexf/checkpoint_io.hpp>

#include "config_json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

namespace nexf {

namespace {

constexpr int kRenderChunk = 1024;

// Per-point ln(exposure) column for R rays of S samples each.
Mat log_exposure_per_sample(const Mat &exposure, int samples) {
    Mat out(exposure.rows() * samples, 1);
    for (Index r = 0; r < exposure.rows(); ++r)
        out.block(r * samples, 0, samples, 1).setConstant(std::log(exposure(r, 0)));
    return out;
}

Json meta_json(const Checkpoint &c) {
    const Model &m = c.model;
    return Json{{"radiance_field",
                 radiance_to_json(m.radiance, RadianceProfile::default_profile, true)},
                {"exposure_field", exposure_field_to_json(m.exposure)},
                {"bounds", Json{{"lo", vec3_to_json(m.bounds.lo)}, {"hi", vec3_to_json(m.bounds.hi)}}},
                {"samples_per_ray", m.samples_per_ray},
                {"conditioning", conditioning_name(m.conditioning)},
                {"train", train_to_json(c.train)},
                {"weights", weights_to_json(c.train.weights)},
                {"seed", c.train.seed},
                {"iteration", c.iteration},
                {"adam_steps", c.optimizer.steps()},
                {"rng",
                 Json{{"sampling", c.sampling.state()},
                      {"jitter", c.jitter.state()},
                      {"noise", c.noise.state()}}}};
}

}  // namespace

TrainConfig TrainConfig::forward_facing() { return TrainConfig{}; }

TrainConfig TrainConfig::room_scale() {
    TrainConfig cfg;
    cfg.iterations = 25000;
    return cfg;
}

void TrainConfig::validate() const {
    if (iterations < 0)
        throw Error("train: iterations must be >= 0");
    if (rays_per_batch < 1)
        throw Error("train: rays_per_batch must be >= 1");
    if (samples_per_ray < 1)
        throw Error("train: samples_per_ray must be >= 1");
    if (!(lr_max > 0.0) || !(lr_min >= 0.0) || lr_min > lr_max)
        throw Error("train: need 0 <= lr_min <= lr_max and lr_max > 0");
    if (warmup < 0)
        throw Error("train: warmup must be >= 0");
    if (!(reg_noise >= 0.0))
        throw Error("train: reg_noise must be >= 0");
    weights.validate();
}

Model init_model(const RadianceFieldConfig &radiance, const ExposureFieldConfig &exposure,
                 const Aabb &bounds, int samples_per_ray, std::uint64_t seed) {
    Model m;
    m.radiance = radiance;
    m.exposure = exposure;
    m.bounds = bounds;
    m.samples_per_ray = samples_per_ray;
    register_radiance_field(m.params, radiance);
    register_exposure_field(m.params, exposure);
    Rng rng = Rng::substream(seed, "init");
    init_radiance_field(m.params, radiance, rng);
    init_exposure_field(m.params, exposure, rng);
    return m;
}

Checkpoint init_checkpoint(RadianceFieldConfig radiance, const ExposureFieldConfig &exposure,
                           const TrainConfig &train, const DatasetManifest &manifest) {
    train.validate();
    const auto train_views = manifest.indices("train");
    if (train_views.empty())
        throw Error("train: manifest has no train views");
    radiance.glo_count = radiance.glo ? static_cast<int>(train_views.size()) : 0;
    Checkpoint c{init_model(radiance, exposure, manifest.bounds, train.samples_per_ray, train.seed),
                 train,
                 0,
                 Adam{},
                 Rng::substream(train.seed, "sampling"),
                 Rng::substream(train.seed, "jitter"),
                 Rng::substream(train.seed, "reg-noise")};
    return c;
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
    ParamFile file;
    file.params = ckpt.model.params;
    file.meta = meta_json(ckpt).dump(2);
    if (ckpt.optimizer.steps() > 0) {
        file.extras["adam.m"] = ckpt.optimizer.first_moment();
        file.extras["adam.v"] = ckpt.optimizer.second_moment();
    }
    write_param_file(path, file);
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
    ParamFile file = read_param_file(path);
    Checkpoint c;
    try {
        const Json meta = Json::parse(file.meta);
        c.model.radiance = radiance_from_json(meta.at("radiance_field"), "radiance_field", nullptr);
        c.model.exposure = exposure_field_from_json(meta.at("exposure_field"), "exposure_field");
        c.model.bounds.lo = vec3_from_json(meta.at("bounds").at("lo"), "bounds.lo");
        c.model.bounds.hi = vec3_from_json(meta.at("bounds").at("hi"), "bounds.hi");
        c.model.samples_per_ray = meta.at("samples_per_ray").get<int>();
        c.model.conditioning = conditioning_from_name(meta.at("conditioning").get<std::string>());
        train_from_json(meta.at("train"), "train", c.train);
        c.train.weights = weights_from_json(meta.at("weights"), "weights");
        c.train.seed = meta.at("seed").get<std::uint64_t>();
        c.iteration = meta.at("iteration").get<std::int64_t>();
        const auto steps = meta.at("adam_steps").get<std::int64_t>();
        if (steps > 0)
            c.optimizer.restore(steps, file.extras.at("adam.m"), file.extras.at("adam.v"));
        c.sampling.set_state(meta.at("rng").at("sampling").get<std::string>());
        c.jitter.set_state(meta.at("rng").at("jitter").get<std::string>());
        c.noise.set_state(meta.at("rng").at("noise").get<std::string>());
    } catch (const Json::exception &e) {
        throw Error("checkpoint " + path.string() + " has invalid metadata: " + e.what());
    } catch (const std::out_of_range &) {
        throw Error("checkpoint " + path.string() + " lacks optimizer moments");
    }
    ParamStore layout;
    register_radiance_field(layout, c.model.radiance);
    register_exposure_field(layout, c.model.exposure);
    if (layout.segments() != file.params.segments())
        throw Error("checkpoint " + path.string() + ": parameter layout does not match its configs");
    c.model.params = std::move(file.params);
    return c;
}

LossGraph build_training_loss(Tape &tape, const Model &model, const WeightConfig &weights,
                              const RayBatch &batch) {
    const RaySamples &s = batch.samples;
    const Index R = s.num_rays, S = s.num_samples;
    const Mat log_dt = log_exposure_per_sample(batch.exposure, static_cast<int>(S));
    const RadianceVars rv = radiance_forward(tape, model.params, model.radiance, s.positions,
                                             s.directions, log_dt, batch.glo_index);

    LossGraph g;
    g.weights = compositing_weights(tape, tape.reshape(rv.sigma, R, S), s.deltas);
    g.color = tape.weighted_sum(g.weights, rv.color);
    g.photometric = photometric_loss(tape, g.color, batch.gt_color);

    const Tape::Var frozen = tape.detach(g.weights);
    const Tape::Var e = exposure_forward(tape, model.params, model.exposure, s.positions);
    g.exposure_pixel = tape.weighted_sum(frozen, e);
    if (weights.reg_weight != 0.0) {
        const Mat shifted = s.positions + batch.noise;
        const Tape::Var e2 = exposure_forward(tape, model.params, model.exposure, shifted);
        g.exposure_reg = tape.weighted_sum(frozen, tape.square(tape.sub(e, e2)));
    } else {
        g.exposure_reg = tape.constant(Mat::Zero(R, 1));
    }

    Mat pw(R, 1);
    for (Index r = 0; r < R; ++r)
        pw(r, 0) = pixel_weight({batch.gt_color(r, 0), batch.gt_color(r, 1), batch.gt_color(r, 2)},
                                weights);
    g.exposure = exposure_loss(tape, g.exposure_pixel, batch.exposure, pw, g.exposure_reg,
                               weights.reg_weight);
    g.total = tape.add(g.photometric, g.exposure);
    return g;
}

Trainer::Trainer(const Dataset &data, Checkpoint ckpt)
    : data_(data), ckpt_(std::move(ckpt)), train_views_(data.manifest.indices("train")) {
    ckpt_.train.validate();
    if (train_views_.empty())
        throw Error("train: manifest has no train views");
    if (data_.images.size() != data_.manifest.views.size())
        throw Error("train: dataset images are not loaded");
    const RadianceFieldConfig &rc = ckpt_.model.radiance;
    if (rc.glo && rc.glo_count != static_cast<int>(train_views_.size()))
        throw Error("train: GLO table size does not match the number of train views");
}

RayBatch Trainer::sample_batch() {
    const TrainConfig &cfg = ckpt_.train;
    const int R = cfg.rays_per_batch, S = cfg.samples_per_ray;
    std::vector<Ray> rays;
    rays.reserve(static_cast<std::size_t>(R));
    RayBatch batch;
    batch.gt_color.resize(R, 3);
    batch.exposure.resize(R, 1);
    const bool glo = ckpt_.model.params.has(kGloScale);
    std::vector<int> ray_glo;
    for (int r = 0; r < R; ++r) {
        const std::size_t k = ckpt_.sampling.below(train_views_.size());
        const std::size_t v = train_views_[k];
        const ManifestView &view = data_.manifest.views[v];
        const ImageBuffer &img = data_.images[v];
        Pixel px;
        px.row = static_cast<int>(ckpt_.sampling.below(static_cast<std::uint64_t>(img.height)));
        px.col = static_cast<int>(ckpt_.sampling.below(static_cast<std::uint64_t>(img.width)));
        const Pixel one[1] = {px};
        Ray ray = generate_rays(view.camera, one, ckpt_.model.bounds).front();
        ray.view_index = static_cast<int>(v);
        ray.exposure = view.exposure;
        rays.push_back(ray);
        for (int c = 0; c < 3; ++c)
            batch.gt_color(r, c) = img.at(px.row, px.col, c);
        batch.exposure(r, 0) = view.exposure;
        ray_glo.push_back(static_cast<int>(k));
    }
    batch.samples = sample_stratified(rays, S, &ckpt_.jitter);
    if (glo) {
        batch.glo_index.reserve(static_cast<std::size_t>(R) * S);
        for (int g : ray_glo)
            batch.glo_index.insert(batch.glo_index.end(), static_cast<std::size_t>(S), g);
    }
    batch.noise.resize(static_cast<Index>(R) * S, 3);
    if (cfg.weights.reg_weight != 0.0) {
        for (Index i = 0; i < batch.noise.size(); ++i)
            batch.noise.data()[i] = cfg.reg_noise * ckpt_.noise.normal();
    } else {
        batch.noise.setZero();
    }
    return batch;
}

LossRecord Trainer::step() {
    const std::int64_t it = ckpt_.iteration;
    RayBatch batch = sample_batch();
    Tape tape;
    LossRecord rec;
    std::vector<double> grads;
    try {
        const LossGraph g = build_training_loss(tape, ckpt_.model, ckpt_.train.weights, batch);
        rec.photometric = tape.scalar(g.photometric);
        rec.exposure = tape.scalar(g.exposure);
        rec.total = tape.scalar(g.total);
        grads = tape.gradient(g.total, ckpt_.model.params.size());
    } catch (const NonFiniteError &e) {
        throw Error("training diverged at iteration " + std::to_string(it) + ": " + e.what());
    }
    for (double gv : grads)
        if (!std::isfinite(gv))
            throw Error("training diverged at iteration " + std::to_string(it) +
                        ": non-finite gradient");
    const TrainConfig &cfg = ckpt_.train;
    const double lr = cosine_lr(it, cfg.iterations, cfg.lr_max, cfg.lr_min, cfg.warmup);
    ckpt_.optimizer.step(ckpt_.model.params.data(), grads, lr);
    rec.iteration = it;
    ckpt_.iteration = it + 1;
    return rec;
}

void Trainer::run(const std::function<void(const LossRecord &)> &on_step) {
    while (ckpt_.iteration < ckpt_.train.iterations) {
        const LossRecord rec = step();
        if (on_step)
            on_step(rec);
    }
}

Checkpoint train(const Dataset &data, Checkpoint ckpt, std::vector<LossRecord> *trace) {
    Trainer t(data, std::move(ckpt));
    t.run([&](const LossRecord &r) {
        if (trace)
            trace->push_back(r);
    });
    return t.release();
}

void write_loss_csv(const std::filesystem::path &path, const std::vector<LossRecord> &trace) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << "iteration,L_f,L_e,total\n" << std::setprecision(17);
    for (const LossRecord &r : trace)
        out << r.iteration << ',' << r.photometric << ',' << r.exposure << ',' << r.total << '\n';
    if (!out)
        throw Error("failed writing " + path.string());
}

namespace {

struct ChunkGeometry {
    RaySamples samples;
    Mat weights;  // R x S
};

ChunkGeometry chunk_geometry(const Model &model, const Camera &camera,
                             std::span<const Pixel> pixels) {
    ChunkGeometry g;
    const std::vector<Ray> rays = generate_rays(camera, pixels, model.bounds);
    g.samples = sample_stratified(rays, model.samples_per_ray, nullptr);
    // Density does not depend on the exposure input.
    const Mat zero = Mat::Zero(g.samples.positions.rows(), 1);
    const RadianceBatch rb =
        radiance_forward(model.params, model.radiance, g.samples.positions, g.samples.directions, zero);
    Mat sigma = Eigen::Map<const Mat>(rb.sigma.data(), g.samples.num_rays, g.samples.num_samples);
    g.weights = compositing_weights(sigma, g.samples.deltas);
    return g;
}

template <typename Fn>
ImageBuffer render_chunks(const Camera &camera, int channels, Fn &&fn) {
    camera.validate();
    ImageBuffer img(camera.width, camera.height, channels);
    const std::vector<Pixel> pixels = all_pixels(camera);
    for (std::size_t start = 0; start < pixels.size(); start += kRenderChunk) {
        const std::size_t n = std::min<std::size_t>(kRenderChunk, pixels.size() - start);
        const std::span<const Pixel> chunk(pixels.data() + start, n);
        const Mat values = fn(chunk);
        for (std::size_t i = 0; i < n; ++i)
            for (int c = 0; c < channels; ++c)
                img.at(chunk[i].row, chunk[i].col, c) = values(static_cast<Index>(i), c);
    }
    return img;
}

}  // namespace

ImageBuffer render_view(const Model &model, const Camera &camera, RenderMode mode) {
    if (mode.kind == RenderMode::Kind::input_exposure && !(mode.exposure > 0.0))
        throw Error("render: exposure must be positive");
    return render_chunks(camera, 3, [&](std::span<const Pixel> chunk) {
        const ChunkGeometry g = chunk_geometry(model, camera, chunk);
        const RaySamples &s = g.samples;
        Mat log_dt(s.positions.rows(), 1);
        if (mode.kind == RenderMode::Kind::input_exposure) {
            log_dt.setConstant(std::log(mode.exposure));
        } else if (model.conditioning == TestConditioning::per_point) {
            log_dt = exposure_forward(model.params, model.exposure, s.positions).array().log();
        } else {
            const Mat e = exposure_forward(model.params, model.exposure, s.positions);
            const Mat dt = composite(g.weights, e);
            for (Index r = 0; r < s.num_rays; ++r) {
                const double wsum = g.weights.row(r).sum();
                const double v = wsum > 1e-6 ? dt(r, 0) / wsum : 1.0;
                log_dt.block(r * s.num_samples, 0, s.num_samples, 1).setConstant(std::log(v));
            }
        }
        if (!log_dt.allFinite())
            throw Error("render: exposure field produced a non-positive exposure");
        const RadianceBatch rb =
            radiance_forward(model.params, model.radiance, s.positions, s.directions, log_dt);
        return composite(g.weights, rb.color);
    });
}

ImageBuffer export_exposure_map(const Model &model, const Camera &camera) {
    return render_chunks(camera, 1, [&](std::span<const Pixel> chunk) {
        const ChunkGeometry g = chunk_geometry(model, camera, chunk);
        return composite(g.weights, exposure_forward(model.params, model.exposure, g.samples.positions));
    });
}

}  // namespace nexf
