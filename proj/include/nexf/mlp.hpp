// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/param_store.hpp>
#include <nexf/rng.hpp>
#include <nexf/tape.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nexf {

// Frequency encoding (x, sin(2^0 pi x), cos(2^0 pi x), ..., sin(2^{L-1} pi x),
// cos(2^{L-1} pi x)); each band holds the three components in order.
std::vector<double> posenc(std::span<const double> x, int num_freqs);
// Row-wise encoding of an n x 3 matrix into n x (3 + 6L).
Mat posenc(const Mat &x, int num_freqs);
constexpr Index posenc_dim(int num_freqs) { return 3 + 6 * static_cast<Index>(num_freqs); }

enum class Activation { relu };
enum class OutputActivation { none, sigmoid, softplus, exp };

// Fully connected stack. widths = {input, hidden..., output}. When
// skip_layer is set to k, layer k consumes concat(h_k, input).
struct MlpSpec {
    std::vector<int> widths;
    Activation activation = Activation::relu;
    OutputActivation output = OutputActivation::none;
    std::optional<int> skip_layer;

    int input_dim() const { return widths.front(); }
    int output_dim() const { return widths.back(); }
    std::size_t num_layers() const { return widths.size() - 1; }
    int fan_in(std::size_t layer) const;
    // Throws Error unless there is at least one hidden layer and widths >= 1.
    void validate() const;
    bool operator==(const MlpSpec &) const = default;
};

// Segments "<prefix>.w<i>" (fan_in x out) and "<prefix>.b<i>" (out).
void mlp_register(ParamStore &store, std::string_view prefix, const MlpSpec &spec);
// He-normal hidden layers, fan-in-scaled output layer, zero biases.
void mlp_init(ParamStore &store, std::string_view prefix, const MlpSpec &spec, Rng &rng);

// Batched evaluation: one input per row.
Mat mlp_forward(const ParamStore &store, std::string_view prefix, const MlpSpec &spec,
                const Mat &input);
std::vector<double> mlp_forward(const ParamStore &store, std::string_view prefix,
                                const MlpSpec &spec, std::span<const double> input);
// Same network recorded on a tape.
Tape::Var mlp_forward(Tape &tape, const ParamStore &store, std::string_view prefix,
                      const MlpSpec &spec, Tape::Var input);

}  // namespace nexf
