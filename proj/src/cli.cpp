// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/cli.hpp>

#include <nexf/config.hpp>
#include <nexf/evaluate.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

namespace nexf {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string manifest;
    std::string checkpoint;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string mode = "nexf";
    std::optional<std::int64_t> iterations;
    bool resume = false;
};

RenderMode parse_mode(const std::string &mode) {
    if (mode == "nexf")
        return RenderMode::nexf();
    const std::string prefix = "exposure:";
    if (mode.rfind(prefix, 0) == 0) {
        const std::string num = mode.substr(prefix.size());
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(num, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used == num.size() && !num.empty() && std::isfinite(v) && v > 0.0)
            return RenderMode::at_exposure(v);
    }
    throw ConfigError("--mode must be 'nexf' or 'exposure:<positive float>', got '" + mode + "'");
}

RunConfig run_config(const Options &o, bool required) {
    RunConfig cfg;
    if (!o.config.empty())
        cfg = load_run_config(o.config);
    else if (required)
        throw ConfigError("--config is required");
    if (o.seed) {
        cfg.seed = *o.seed;
        cfg.train.seed = *o.seed;
    }
    if (o.iterations) {
        if (*o.iterations < 0)
            throw ConfigError("--iterations must be >= 0");
        cfg.train.iterations = *o.iterations;
    }
    return cfg;
}

fs::path out_dir(const Options &o, const RunConfig &cfg) {
    const fs::path dir = o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out);
    fs::create_directories(dir);
    return dir;
}

std::string two_digits(int v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

// (id, camera) pairs to render: one per test stack, else every train view.
std::vector<std::pair<int, Camera>> render_cameras(const DatasetManifest &m) {
    std::vector<std::pair<int, Camera>> out;
    std::set<int> seen;
    for (std::size_t i : m.indices("test"))
        if (seen.insert(m.views[i].view_id).second)
            out.emplace_back(m.views[i].view_id, m.views[i].camera);
    if (out.empty())
        for (std::size_t i : m.indices("train"))
            out.emplace_back(static_cast<int>(i), m.views[i].camera);
    return out;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f)
        throw Error("failed writing " + path.string());
}

int cmd_synth(const Options &o, std::ostream &out) {
    const RunConfig cfg = run_config(o, true);
    const fs::path dir = out_dir(o, cfg);
    const Dataset data = build_dataset(cfg.scene.field, rig_train_cameras(cfg.scene.rig),
                                       rig_test_cameras(cfg.scene.rig), cfg.scene.exposure_set,
                                       cfg.seed, cfg.scene.capture);
    const fs::path manifest = write_dataset(data, dir);
    out << "wrote " << manifest.string() << " (" << data.manifest.indices("train").size()
        << " train views, " << cfg.scene.rig.test_views << " test views)\n";
    return kExitOk;
}

int cmd_train(const Options &o, std::ostream &out) {
    const RunConfig cfg = run_config(o, false);
    if (o.manifest.empty())
        throw ConfigError("--manifest is required");
    if (o.resume && o.checkpoint.empty())
        throw ConfigError("--resume needs --checkpoint");
    const fs::path dir = out_dir(o, cfg);
    const Dataset data = load_dataset(o.manifest);
    Checkpoint ckpt;
    if (o.resume) {
        ckpt = load_checkpoint(o.checkpoint);
        if (o.iterations)
            ckpt.train.iterations = *o.iterations;
    } else {
        ckpt = init_checkpoint(cfg.radiance, cfg.exposure, cfg.train, data.manifest);
        ckpt.model.conditioning = cfg.conditioning;
    }
    std::vector<LossRecord> trace;
    Trainer trainer(data, std::move(ckpt));
    trainer.run([&](const LossRecord &r) {
        trace.push_back(r);
        if ((r.iteration + 1) % 250 == 0)
            out << "iteration " << r.iteration + 1 << ": L_f=" << r.photometric
                << " L_e=" << r.exposure << '\n';
    });
    const Checkpoint &done = trainer.checkpoint();
    save_checkpoint(dir / "checkpoint.nexf", done);
    write_loss_csv(dir / "loss.csv", trace);
    if (!trace.empty()) {
        const LossRecord &r = trace.back();
        out << "final L_f=" << r.photometric << " L_e=" << r.exposure << " L=" << r.total << '\n';
    }
    const auto test = data.manifest.indices("test");
    if (!test.empty()) {
        double total = 0.0;
        for (std::size_t i : test) {
            const ManifestView &v = data.manifest.views[i];
            total += psnr(render_view(done.model, v.camera, RenderMode::at_exposure(v.exposure)),
                          data.images[i]);
        }
        out << "test PSNR at input exposures: " << total / static_cast<double>(test.size())
            << " dB\n";
    }
    out << "wrote " << (dir / "checkpoint.nexf").string() << '\n';
    return kExitOk;
}

int cmd_render(const Options &o, std::ostream &out, bool exposure_map) {
    if (o.checkpoint.empty() || o.manifest.empty())
        throw ConfigError("--checkpoint and --manifest are required");
    const RenderMode mode = parse_mode(o.mode);
    const RunConfig cfg = run_config(o, false);
    const fs::path dir = out_dir(o, cfg);
    const Checkpoint ckpt = load_checkpoint(o.checkpoint);
    const DatasetManifest m = read_manifest(o.manifest);
    for (const auto &[id, cam] : render_cameras(m)) {
        if (exposure_map) {
            const fs::path p = dir / ("expmap_" + two_digits(id) + ".pfm");
            write_pfm(p, export_exposure_map(ckpt.model, cam));
            out << "wrote " << p.string() << '\n';
        } else {
            const fs::path p = dir / ("render_" + two_digits(id) + ".ppm");
            write_ppm(p, render_view(ckpt.model, cam, mode));
            out << "wrote " << p.string() << '\n';
        }
    }
    return kExitOk;
}

int cmd_fuse(const Options &o, std::ostream &out) {
    if (o.manifest.empty())
        throw ConfigError("--manifest is required");
    const RunConfig cfg = run_config(o, false);
    const fs::path dir = out_dir(o, cfg);
    const Dataset data = load_dataset(o.manifest);
    for (const TestStack &s : test_stacks(data)) {
        const fs::path p = dir / ("fused_" + two_digits(s.view_id) + ".ppm");
        write_ppm(p, mertens_fuse(s.images, cfg.fusion));
        out << "wrote " << p.string() << '\n';
    }
    return kExitOk;
}

int cmd_eval(const Options &o, std::ostream &out) {
    if (o.checkpoint.empty() || o.manifest.empty())
        throw ConfigError("--checkpoint and --manifest are required");
    const RunConfig cfg = run_config(o, false);
    const fs::path dir = out_dir(o, cfg);
    const Checkpoint ckpt = load_checkpoint(o.checkpoint);
    const Dataset data = load_dataset(o.manifest);
    const EvalReport rep = evaluate(ckpt.model, data, cfg.fusion);
    write_text(dir / "metrics.json", report_json(rep));
    write_text(dir / "metrics.csv", report_csv(rep));
    out << "NExF      PSNR " << rep.mean_nexf.psnr << " dB  SSIM " << rep.mean_nexf.ssim << '\n'
        << "baseline  PSNR " << rep.mean_baseline.psnr << " dB  SSIM " << rep.mean_baseline.ssim
        << " (exposure " << rep.baseline_exposure << ")\n"
        << "MSE reduction " << rep.mse_reduction << '\n'
        << "wrote " << (dir / "metrics.json").string() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Neural exposure fields on synthetic HDR scenes", "nexf"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", o.config, "Run configuration (JSON)");
        sub->add_option("--out", o.out, "Output directory (default: output_dir of the config)");
        sub->add_option("--seed", o.seed, "Override the config seed");
    };
    CLI::App *synth = app.add_subcommand("synth", "Render a synthetic multi-exposure dataset");
    add_common(synth);
    CLI::App *train = app.add_subcommand("train", "Jointly train the radiance and exposure fields");
    add_common(train);
    train->add_option("--manifest", o.manifest, "Dataset manifest");
    train->add_option("--checkpoint", o.checkpoint, "Checkpoint to resume from (with --resume)");
    train->add_option("--iterations", o.iterations, "Override the iteration count");
    train->add_flag("--resume", o.resume, "Continue from --checkpoint");
    CLI::App *render = app.add_subcommand("render", "Render views from a checkpoint");
    add_common(render);
    render->add_option("--manifest", o.manifest, "Dataset manifest (cameras)");
    render->add_option("--checkpoint", o.checkpoint, "Trained checkpoint");
    render->add_option("--mode", o.mode, "nexf | exposure:<float>");
    CLI::App *expmap = app.add_subcommand("expmap", "Export rendered exposure-field maps");
    add_common(expmap);
    expmap->add_option("--manifest", o.manifest, "Dataset manifest (cameras)");
    expmap->add_option("--checkpoint", o.checkpoint, "Trained checkpoint");
    CLI::App *fuse = app.add_subcommand("fuse", "Exposure-fuse every test stack");
    add_common(fuse);
    fuse->add_option("--manifest", o.manifest, "Dataset manifest");
    CLI::App *eval = app.add_subcommand("eval", "Score NExF and baseline renders on fused targets");
    add_common(eval);
    eval->add_option("--manifest", o.manifest, "Dataset manifest");
    eval->add_option("--checkpoint", o.checkpoint, "Trained checkpoint");
    CLI::App *defaults = app.add_subcommand("defaults", "Print the default run configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (synth->parsed())
            return cmd_synth(o, out);
        if (train->parsed())
            return cmd_train(o, out);
        if (render->parsed())
            return cmd_render(o, out, false);
        if (expmap->parsed())
            return cmd_render(o, out, true);
        if (fuse->parsed())
            return cmd_fuse(o, out);
        if (eval->parsed())
            return cmd_eval(o, out);
        if (defaults->parsed()) {
            out << dump_run_config(RunConfig{});
            return kExitOk;
        }
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitValidation;
}

}  // namespace nexf
