// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/fusion.hpp>

#include <nexf/param_store.hpp>

#include <algorithm>
#include <cmath>

namespace nexf {

namespace {

constexpr double kBinomial[5] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

int clampi(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

ImageBuffer pad_even(const ImageBuffer &img) {
    const int w = img.width + (img.width % 2), h = img.height + (img.height % 2);
    if (w == img.width && h == img.height)
        return img;
    ImageBuffer out(w, h, img.channels);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int k = 0; k < img.channels; ++k)
                out.at(r, c, k) = img.at(std::min(r, img.height - 1), std::min(c, img.width - 1), k);
    return out;
}

// Separable 5-tap binomial blur with replicated borders, scaled by gain.
ImageBuffer blur(const ImageBuffer &img, double gain = 1.0) {
    ImageBuffer tmp(img.width, img.height, img.channels);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            for (int k = 0; k < img.channels; ++k) {
                double s = 0.0;
                for (int t = -2; t <= 2; ++t)
                    s += kBinomial[t + 2] * img.at(r, clampi(c + t, 0, img.width - 1), k);
                tmp.at(r, c, k) = s;
            }
    ImageBuffer out(img.width, img.height, img.channels);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            for (int k = 0; k < img.channels; ++k) {
                double s = 0.0;
                for (int t = -2; t <= 2; ++t)
                    s += kBinomial[t + 2] * tmp.at(clampi(r + t, 0, img.height - 1), c, k);
                out.at(r, c, k) = gain * s;
            }
    return out;
}

ImageBuffer downsample(const ImageBuffer &img) {
    const ImageBuffer b = blur(pad_even(img));
    ImageBuffer out(b.width / 2, b.height / 2, b.channels);
    for (int r = 0; r < out.height; ++r)
        for (int c = 0; c < out.width; ++c)
            for (int k = 0; k < b.channels; ++k)
                out.at(r, c, k) = b.at(2 * r, 2 * c, k);
    return out;
}

// Zero-insertion upsampling to the padded size of (width, height), then crop.
ImageBuffer upsample(const ImageBuffer &img, int width, int height) {
    const int w = width + (width % 2), h = height + (height % 2);
    ImageBuffer z(w, h, img.channels);
    for (int r = 0; r < img.height && 2 * r < h; ++r)
        for (int c = 0; c < img.width && 2 * c < w; ++c)
            for (int k = 0; k < img.channels; ++k)
                z.at(2 * r, 2 * c, k) = img.at(r, c, k);
    const ImageBuffer b = blur(z, 4.0);
    ImageBuffer out(width, height, img.channels);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            for (int k = 0; k < img.channels; ++k)
                out.at(r, c, k) = b.at(r, c, k);
    return out;
}

void require_same(const ImageBuffer &a, const ImageBuffer &b, const char *op) {
    if (!a.same_shape(b))
        throw Error(std::string(op) + ": image dimensions differ");
}

double well_exposed_pixel(const ImageBuffer &img, int r, int c, double sigma) {
    double w = 1.0;
    for (int k = 0; k < img.channels; ++k) {
        const double d = img.at(r, c, k) - 0.5;
        w *= std::exp(-d * d / (2.0 * sigma * sigma));
    }
    return w;
}

}  // namespace

void FusionConfig::validate() const {
    if (contrast < 0.0 || saturation < 0.0 || well_exposedness < 0.0)
        throw Error("fusion: exponents must be >= 0");
    if (contrast == 0.0 && saturation == 0.0 && well_exposedness == 0.0)
        throw Error("fusion: at least one exponent must be positive");
    if (!(sigma > 0.0))
        throw Error("fusion: sigma must be positive");
    if (levels < 0)
        throw Error("fusion: levels must be >= 0");
}

int fusion_levels(const FusionConfig &cfg, int width, int height) {
    if (cfg.levels > 0)
        return cfg.levels;
    const int m = std::max(1, std::min(width, height));
    return std::max(1, static_cast<int>(std::floor(std::log2(static_cast<double>(m)))) - 2);
}

ImageBuffer to_luma(const ImageBuffer &image) {
    if (image.channels == 1)
        return image;
    ImageBuffer out(image.width, image.height, 1);
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c)
            out.at(r, c) = 0.299 * image.at(r, c, 0) + 0.587 * image.at(r, c, 1) +
                           0.114 * image.at(r, c, 2);
    return out;
}

std::vector<ImageBuffer> fusion_weights(const std::vector<ImageBuffer> &stack,
                                        const FusionConfig &cfg) {
    cfg.validate();
    if (stack.empty())
        throw Error("fusion: empty stack");
    for (const ImageBuffer &img : stack) {
        require_same(stack.front(), img, "fusion");
        if (img.channels != 3)
            throw Error("fusion: images must be RGB");
    }
    const int w = stack.front().width, h = stack.front().height;
    std::vector<ImageBuffer> weights;
    for (const ImageBuffer &img : stack) {
        const ImageBuffer y = to_luma(img);
        ImageBuffer wt(w, h, 1);
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                const double lap = y.at(clampi(r - 1, 0, h - 1), c) + y.at(clampi(r + 1, 0, h - 1), c) +
                                   y.at(r, clampi(c - 1, 0, w - 1)) + y.at(r, clampi(c + 1, 0, w - 1)) -
                                   4.0 * y.at(r, c);
                double mu = 0.0;
                for (int k = 0; k < 3; ++k)
                    mu += img.at(r, c, k) / 3.0;
                double var = 0.0;
                for (int k = 0; k < 3; ++k)
                    var += (img.at(r, c, k) - mu) * (img.at(r, c, k) - mu) / 3.0;
                wt.at(r, c) = std::pow(std::abs(lap), cfg.contrast) *
                              std::pow(std::sqrt(var), cfg.saturation) *
                              std::pow(well_exposed_pixel(img, r, c, cfg.sigma), cfg.well_exposedness);
            }
        weights.push_back(std::move(wt));
    }
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double total = 0.0;
            for (ImageBuffer &wt : weights)
                total += wt.at(r, c) + 1e-12;
            for (ImageBuffer &wt : weights)
                wt.at(r, c) = (wt.at(r, c) + 1e-12) / total;
        }
    return weights;
}

std::vector<ImageBuffer> gaussian_pyramid(const ImageBuffer &image, int levels) {
    if (levels < 1)
        throw Error("pyramid: levels must be >= 1");
    std::vector<ImageBuffer> pyr{image};
    for (int i = 1; i < levels; ++i)
        pyr.push_back(downsample(pyr.back()));
    return pyr;
}

std::vector<ImageBuffer> laplacian_pyramid(const ImageBuffer &image, int levels) {
    std::vector<ImageBuffer> pyr = gaussian_pyramid(image, levels);
    for (int i = 0; i + 1 < levels; ++i) {
        const ImageBuffer up = upsample(pyr[i + 1], pyr[i].width, pyr[i].height);
        for (std::size_t k = 0; k < up.data.size(); ++k)
            pyr[i].data[k] -= up.data[k];
    }
    return pyr;
}

ImageBuffer collapse_pyramid(const std::vector<ImageBuffer> &pyramid) {
    if (pyramid.empty())
        throw Error("pyramid: nothing to collapse");
    ImageBuffer cur = pyramid.back();
    for (std::size_t i = pyramid.size() - 1; i-- > 0;) {
        ImageBuffer up = upsample(cur, pyramid[i].width, pyramid[i].height);
        for (std::size_t k = 0; k < up.data.size(); ++k)
            up.data[k] += pyramid[i].data[k];
        cur = std::move(up);
    }
    return cur;
}

ImageBuffer mertens_fuse(const std::vector<ImageBuffer> &stack, const FusionConfig &cfg) {
    const std::vector<ImageBuffer> weights = fusion_weights(stack, cfg);
    const ImageBuffer &first = stack.front();
    const int levels = fusion_levels(cfg, first.width, first.height);
    std::vector<ImageBuffer> blended;
    for (std::size_t n = 0; n < stack.size(); ++n) {
        const std::vector<ImageBuffer> lap = laplacian_pyramid(stack[n], levels);
        const std::vector<ImageBuffer> gw = gaussian_pyramid(weights[n], levels);
        if (blended.empty())
            for (const ImageBuffer &l : lap)
                blended.emplace_back(l.width, l.height, l.channels);
        for (int i = 0; i < levels; ++i) {
            ImageBuffer &b = blended[static_cast<std::size_t>(i)];
            const ImageBuffer &l = lap[static_cast<std::size_t>(i)];
            const ImageBuffer &g = gw[static_cast<std::size_t>(i)];
            for (int r = 0; r < b.height; ++r)
                for (int c = 0; c < b.width; ++c)
                    for (int k = 0; k < b.channels; ++k)
                        b.at(r, c, k) += g.at(r, c) * l.at(r, c, k);
        }
    }
    ImageBuffer out = collapse_pyramid(blended);
    for (double &v : out.data)
        v = std::clamp(v, 0.0, 1.0);
    return out;
}

double mean_well_exposedness(const ImageBuffer &image, double sigma) {
    if (image.pixel_count() == 0)
        throw Error("well-exposedness: empty image");
    double s = 0.0;
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c)
            s += well_exposed_pixel(image, r, c, sigma);
    return s / static_cast<double>(image.pixel_count());
}

double psnr(const ImageBuffer &a, const ImageBuffer &b) {
    require_same(a, b, "psnr");
    if (a.data.empty())
        throw Error("psnr: empty image");
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        se += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
    if (se == 0.0)
        return kPsnrIdentical;
    return 10.0 * std::log10(1.0 / (se / static_cast<double>(a.data.size())));
}

double ssim(const ImageBuffer &a, const ImageBuffer &b) {
    require_same(a, b, "ssim");
    constexpr int kWin = 11;
    if (a.width < kWin || a.height < kWin)
        throw Error("ssim: image smaller than the 11x11 window");
    const ImageBuffer x = to_luma(a), y = to_luma(b);
    double g[kWin * kWin];
    double gs = 0.0;
    for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
            const double di = i - 5, dj = j - 5;
            g[i * kWin + j] = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
            gs += g[i * kWin + j];
        }
    for (double &v : g)
        v /= gs;
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    int count = 0;
    for (int r = 0; r + kWin <= x.height; ++r)
        for (int c = 0; c + kWin <= x.width; ++c) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    const double wv = g[i * kWin + j];
                    const double xv = x.at(r + i, c + j), yv = y.at(r + i, c + j);
                    mx += wv * xv;
                    my += wv * yv;
                    sxx += wv * xv * xv;
                    syy += wv * yv * yv;
                    sxy += wv * xv * yv;
                }
            const double vx = sxx - mx * mx, vy = syy - my * my, cxy = sxy - mx * my;
            total += ((2 * mx * my + c1) * (2 * cxy + c2)) /
                     ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return total / count;
}

double mse_reduction(double psnr_base, double psnr_new) {
    return 1.0 - std::pow(10.0, -(psnr_new - psnr_base) / 10.0);
}

}  // namespace nexf
