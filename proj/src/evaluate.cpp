// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/evaluate.hpp>

#include "json_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace nexf {

namespace {

Json score_json(const ImageScore &s) {
    Json psnr = std::isinf(s.psnr) ? Json("inf") : Json(s.psnr);
    return Json{{"psnr", psnr}, {"ssim", s.ssim}};
}

std::string number(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return Json(v).dump();
}

ImageScore score(const ImageBuffer &img, const ImageBuffer &target) {
    return {psnr(img, target), ssim(img, target)};
}

}  // namespace

std::vector<TestStack> test_stacks(const Dataset &data) {
    const DatasetManifest &m = data.manifest;
    std::map<int, TestStack> stacks;
    for (std::size_t i : m.indices("test")) {
        const ManifestView &v = m.views[i];
        TestStack &s = stacks[v.view_id];
        if (s.images.empty()) {
            s.view_id = v.view_id;
            s.camera = v.camera;
        } else if (!(s.camera == v.camera)) {
            throw Error("test view " + std::to_string(v.view_id) + " mixes cameras in its stack");
        }
        s.exposures.push_back(v.exposure);
        s.images.push_back(data.images.at(i));
    }
    std::vector<TestStack> out;
    for (auto &[id, s] : stacks) {
        for (double e : m.exposure_set)
            if (std::find(s.exposures.begin(), s.exposures.end(), e) == s.exposures.end())
                throw Error("test view " + std::to_string(id) + " is missing exposure " +
                            number(e) + " from its stack");
        out.push_back(std::move(s));
    }
    return out;
}

double mean_train_exposure(const DatasetManifest &manifest) {
    const auto idx = manifest.indices("train");
    if (idx.empty())
        throw Error("manifest has no train views");
    double s = 0.0;
    for (std::size_t i : idx)
        s += manifest.views[i].exposure;
    return s / static_cast<double>(idx.size());
}

EvalReport evaluate(const Model &model, const Dataset &data, const FusionConfig &fusion) {
    const std::vector<TestStack> stacks = test_stacks(data);
    if (stacks.empty())
        throw Error("evaluation needs test views");
    EvalReport rep;
    rep.baseline_exposure = mean_train_exposure(data.manifest);
    for (const TestStack &s : stacks) {
        const ImageBuffer target = mertens_fuse(s.images, fusion);
        ViewReport v;
        v.view_id = s.view_id;
        v.nexf = score(render_view(model, s.camera, RenderMode::nexf()), target);
        v.baseline =
            score(render_view(model, s.camera, RenderMode::at_exposure(rep.baseline_exposure)), target);
        rep.mean_nexf.psnr += v.nexf.psnr / static_cast<double>(stacks.size());
        rep.mean_nexf.ssim += v.nexf.ssim / static_cast<double>(stacks.size());
        rep.mean_baseline.psnr += v.baseline.psnr / static_cast<double>(stacks.size());
        rep.mean_baseline.ssim += v.baseline.ssim / static_cast<double>(stacks.size());
        rep.views.push_back(v);
    }
    rep.mse_reduction = mse_reduction(rep.mean_baseline.psnr, rep.mean_nexf.psnr);
    return rep;
}

std::string report_json(const EvalReport &report) {
    Json views = Json::array();
    for (const ViewReport &v : report.views)
        views.push_back(Json{{"view_id", v.view_id},
                             {"nexf", score_json(v.nexf)},
                             {"baseline", score_json(v.baseline)}});
    const double red = report.mse_reduction;
    const Json doc{{"baseline_exposure", report.baseline_exposure},
                   {"views", views},
                   {"mean", Json{{"nexf", score_json(report.mean_nexf)},
                                 {"baseline", score_json(report.mean_baseline)}}},
                   {"mse_reduction", std::isfinite(red) ? Json(red) : Json(number(red))}};
    return doc.dump(2) + "\n";
}

std::string report_csv(const EvalReport &report) {
    std::ostringstream out;
    out << "view_id,mode,psnr,ssim\n";
    for (const ViewReport &v : report.views) {
        out << v.view_id << ",nexf," << number(v.nexf.psnr) << ',' << number(v.nexf.ssim) << '\n';
        out << v.view_id << ",baseline," << number(v.baseline.psnr) << ','
            << number(v.baseline.ssim) << '\n';
    }
    out << "mean,nexf," << number(report.mean_nexf.psnr) << ',' << number(report.mean_nexf.ssim)
        << '\n';
    out << "mean,baseline," << number(report.mean_baseline.psnr) << ','
        << number(report.mean_baseline.ssim) << '\n';
    return out.str();
}

}  // namespace nexf
