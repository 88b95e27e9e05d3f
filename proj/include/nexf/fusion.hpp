// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/image.hpp>

#include <limits>
#include <vector>

namespace nexf {

// Classical multi-exposure fusion settings. levels = 0 selects
// floor(log2(min(w, h))) - 2, at least 1.
struct FusionConfig {
    double contrast = 1.0;
    double saturation = 1.0;
    double well_exposedness = 1.0;
    double sigma = 0.2;
    int levels = 0;

    void validate() const;
    bool operator==(const FusionConfig &) const = default;
};

int fusion_levels(const FusionConfig &cfg, int width, int height);

// Per-image quality weights, normalized across the stack (1 channel each).
std::vector<ImageBuffer> fusion_weights(const std::vector<ImageBuffer> &stack,
                                        const FusionConfig &cfg);

// Weighted Laplacian-pyramid blend of an LDR stack, clamped to [0, 1].
ImageBuffer mertens_fuse(const std::vector<ImageBuffer> &stack, const FusionConfig &cfg = {});

// Pyramid building blocks. Each level is padded by edge replication to an
// even size before the 5-tap binomial blur and decimation; collapse crops
// back, so collapse(laplacian_pyramid(img, n)) == img.
std::vector<ImageBuffer> gaussian_pyramid(const ImageBuffer &image, int levels);
std::vector<ImageBuffer> laplacian_pyramid(const ImageBuffer &image, int levels);
ImageBuffer collapse_pyramid(const std::vector<ImageBuffer> &pyramid);

// Mean over pixels of prod_c exp(-(c - 1/2)^2 / (2 sigma^2)).
double mean_well_exposedness(const ImageBuffer &image, double sigma = 0.2);

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

// 10 log10(1 / MSE) over every channel; +inf when the images are identical.
double psnr(const ImageBuffer &a, const ImageBuffer &b);
// Mean SSIM of the luma images (0.299 R + 0.587 G + 0.114 B), 11x11
// Gaussian window with sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
double ssim(const ImageBuffer &a, const ImageBuffer &b);
// 1 - 10^(-(psnr_new - psnr_base) / 10)
double mse_reduction(double psnr_base, double psnr_new);

ImageBuffer to_luma(const ImageBuffer &image);

}  // namespace nexf
