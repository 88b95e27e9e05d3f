// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace nexf {

// Row-major interleaved image with 1 or 3 channels. LDR images hold values
// in [0, 1]; HDR images hold nonnegative radiance.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<double> data;

    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, double fill = 0.0);

    double &at(int row, int col, int ch = 0) {
        return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
    }
    double at(int row, int col, int ch = 0) const {
        return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool same_shape(const ImageBuffer &o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    bool operator==(const ImageBuffer &) const = default;
};

// Portable float map, little-endian, scale -1. Rows are stored bottom-up as
// the format requires; ImageBuffer rows stay top-down in memory.
void write_pfm(const std::filesystem::path &path, const ImageBuffer &image);
ImageBuffer read_pfm(const std::filesystem::path &path);

// Binary PPM (P6) or PGM (P5), maxval 255. Values are clamped to [0, 1] and
// quantized as floor(v * 255 + 0.5).
void write_ppm(const std::filesystem::path &path, const ImageBuffer &image);
ImageBuffer read_ppm(const std::filesystem::path &path);

std::uint8_t quantize_unit(double v);

}  // namespace nexf
