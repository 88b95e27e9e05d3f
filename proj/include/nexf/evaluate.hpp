// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/fusion.hpp>
#include <nexf/scene.hpp>
#include <nexf/trainer.hpp>

#include <string>
#include <vector>

namespace nexf {

// A test camera captured at every exposure of the set.
struct TestStack {
    int view_id = 0;
    Camera camera;
    std::vector<double> exposures;
    std::vector<ImageBuffer> images;
};

// Groups the test views by view_id. Throws Error if any stack is missing an
// exposure from the set.
std::vector<TestStack> test_stacks(const Dataset &data);

// Arithmetic mean of the train-view exposures.
double mean_train_exposure(const DatasetManifest &manifest);

struct ImageScore {
    double psnr = 0.0;
    double ssim = 0.0;
};

struct ViewReport {
    int view_id = 0;
    ImageScore nexf;
    ImageScore baseline;
};

struct EvalReport {
    double baseline_exposure = 1.0;
    std::vector<ViewReport> views;
    ImageScore mean_nexf;
    ImageScore mean_baseline;
    // mse_reduction(mean baseline PSNR, mean NExF PSNR)
    double mse_reduction = 0.0;
};

// Fuses each test stack into a target, renders it in NExF mode and at the
// mean train exposure, and scores both.
EvalReport evaluate(const Model &model, const Dataset &data, const FusionConfig &fusion);

// {"psnr": f, "ssim": f} per view and mean; an infinite PSNR is written as
// the string "inf".
std::string report_json(const EvalReport &report);
// view_id,mode,psnr,ssim rows plus a "mean" row per mode.
std::string report_csv(const EvalReport &report);

}  // namespace nexf
