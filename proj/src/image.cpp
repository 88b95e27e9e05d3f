// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/image.hpp>
#include <nexf/param_store.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace nexf {

namespace {

std::string next_token(std::istream &in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int parse_positive(const std::string &tok, const std::filesystem::path &path) {
    try {
        const int v = std::stoi(tok);
        if (v > 0)
            return v;
    } catch (const std::exception &) {
    }
    throw Error("malformed image header in " + path.string());
}

float swap_bytes(float f) {
    const auto u = std::bit_cast<std::uint32_t>(f);
    return std::bit_cast<float>((u >> 24) | ((u >> 8) & 0xff00u) | ((u << 8) & 0xff0000u) |
                                (u << 24));
}

}  // namespace

ImageBuffer::ImageBuffer(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, fill) {
    if (w < 0 || h < 0 || (c != 1 && c != 3))
        throw Error("ImageBuffer: invalid dimensions or channel count");
}

std::uint8_t quantize_unit(double v) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

void write_pfm(const std::filesystem::path &path, const ImageBuffer &image) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << (image.channels == 3 ? "PF" : "Pf") << "\n"
        << image.width << " " << image.height << "\n-1.0\n";
    std::vector<float> row(static_cast<std::size_t>(image.width) * image.channels);
    for (int r = image.height - 1; r >= 0; --r) {
        for (int c = 0; c < image.width; ++c)
            for (int ch = 0; ch < image.channels; ++ch)
                row[static_cast<std::size_t>(c) * image.channels + ch] =
                    static_cast<float>(image.at(r, c, ch));
        if constexpr (std::endian::native == std::endian::big) {
            for (float &f : row)
                f = swap_bytes(f);
        }
        out.write(reinterpret_cast<const char *>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out)
        throw Error("failed writing " + path.string());
}

ImageBuffer read_pfm(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    const std::string magic = next_token(in);
    int channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw Error(path.string() + " is not a PFM file");
    const int w = parse_positive(next_token(in), path);
    const int h = parse_positive(next_token(in), path);
    const double scale = std::stod(next_token(in));
    const bool little = scale < 0;
    ImageBuffer img(w, h, channels);
    std::vector<float> row(static_cast<std::size_t>(w) * channels);
    for (int r = h - 1; r >= 0; --r) {
        in.read(reinterpret_cast<char *>(row.data()),
                static_cast<std::streamsize>(row.size() * sizeof(float)));
        if (!in)
            throw Error("truncated PFM data in " + path.string());
        const bool swap = little != (std::endian::native == std::endian::little);
        for (std::size_t i = 0; i < row.size(); ++i) {
            float f = row[i];
            if (swap)
                f = swap_bytes(f);
            img.data[static_cast<std::size_t>(r) * row.size() + i] = f;
        }
    }
    return img;
}

void write_ppm(const std::filesystem::path &path, const ImageBuffer &image) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    out << (image.channels == 3 ? "P6" : "P5") << "\n"
        << image.width << " " << image.height << "\n255\n";
    std::vector<std::uint8_t> bytes(image.data.size());
    std::transform(image.data.begin(), image.data.end(), bytes.begin(), &quantize_unit);
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("failed writing " + path.string());
}

ImageBuffer read_ppm(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    const std::string magic = next_token(in);
    int channels;
    if (magic == "P6")
        channels = 3;
    else if (magic == "P5")
        channels = 1;
    else
        throw Error(path.string() + " is not a binary PPM/PGM file");
    const int w = parse_positive(next_token(in), path);
    const int h = parse_positive(next_token(in), path);
    const int maxval = parse_positive(next_token(in), path);
    if (maxval != 255)
        throw Error(path.string() + ": only maxval 255 is supported");
    ImageBuffer img(w, h, channels);
    std::vector<std::uint8_t> bytes(img.data.size());
    in.read(reinterpret_cast<char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!in)
        throw Error("truncated PPM data in " + path.string());
    std::transform(bytes.begin(), bytes.end(), img.data.begin(),
                   [](std::uint8_t b) { return b / 255.0; });
    return img;
}

}  // namespace nexf
