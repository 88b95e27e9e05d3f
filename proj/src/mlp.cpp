// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/mlp.hpp>

#include <cmath>
#include <numbers>

namespace nexf {

namespace {

std::string weight_name(std::string_view prefix, std::size_t i) {
    return std::string(prefix) + ".w" + std::to_string(i);
}

std::string bias_name(std::string_view prefix, std::size_t i) {
    return std::string(prefix) + ".b" + std::to_string(i);
}

Mat apply_output(Mat z, OutputActivation act) {
    switch (act) {
    case OutputActivation::none:
        return z;
    case OutputActivation::sigmoid:
        return z.unaryExpr([](double v) {
            return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
        });
    case OutputActivation::softplus:
        return z.unaryExpr(
            [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); });
    case OutputActivation::exp:
        return z.array().exp();
    }
    return z;
}

Tape::Var apply_output(Tape &tape, Tape::Var z, OutputActivation act) {
    switch (act) {
    case OutputActivation::none:
        return z;
    case OutputActivation::sigmoid:
        return tape.sigmoid(z);
    case OutputActivation::softplus:
        return tape.softplus(z);
    case OutputActivation::exp:
        return tape.exp(z);
    }
    return z;
}

void check_input(const MlpSpec &spec, Index cols) {
    spec.validate();
    if (cols != spec.input_dim())
        throw Error("mlp_forward: input has " + std::to_string(cols) + " features, expected " +
                    std::to_string(spec.input_dim()));
}

}  // namespace

std::vector<double> posenc(std::span<const double> x, int num_freqs) {
    if (x.size() != 3)
        throw Error("posenc: expected a 3-vector");
    if (num_freqs < 0)
        throw Error("posenc: negative frequency count");
    std::vector<double> out(static_cast<std::size_t>(posenc_dim(num_freqs)));
    for (int i = 0; i < 3; ++i)
        out[i] = x[i];
    for (int k = 0; k < num_freqs; ++k) {
        const double f = std::ldexp(std::numbers::pi, k);
        for (int i = 0; i < 3; ++i) {
            out[3 + 6 * k + i] = std::sin(f * x[i]);
            out[6 + 6 * k + i] = std::cos(f * x[i]);
        }
    }
    return out;
}

Mat posenc(const Mat &x, int num_freqs) {
    if (x.cols() != 3)
        throw Error("posenc: expected n x 3 input");
    if (num_freqs < 0)
        throw Error("posenc: negative frequency count");
    Mat out(x.rows(), posenc_dim(num_freqs));
    out.leftCols(3) = x;
    for (int k = 0; k < num_freqs; ++k) {
        const double f = std::ldexp(std::numbers::pi, k);
        out.middleCols(3 + 6 * k, 3) = (f * x.array()).sin();
        out.middleCols(6 + 6 * k, 3) = (f * x.array()).cos();
    }
    return out;
}

int MlpSpec::fan_in(std::size_t layer) const {
    int in = widths[layer];
    if (skip_layer && static_cast<std::size_t>(*skip_layer) == layer)
        in += widths.front();
    return in;
}

void MlpSpec::validate() const {
    if (widths.size() < 3)
        throw Error("MlpSpec: at least one hidden layer is required");
    for (int w : widths)
        if (w < 1)
            throw Error("MlpSpec: layer widths must be positive");
    if (skip_layer && (*skip_layer < 1 || static_cast<std::size_t>(*skip_layer) >= num_layers()))
        throw Error("MlpSpec: skip layer out of range");
}

void mlp_register(ParamStore &store, std::string_view prefix, const MlpSpec &spec) {
    spec.validate();
    for (std::size_t i = 0; i < spec.num_layers(); ++i) {
        const auto in = static_cast<std::size_t>(spec.fan_in(i));
        const auto out = static_cast<std::size_t>(spec.widths[i + 1]);
        store.add(weight_name(prefix, i), {in, out});
        store.add(bias_name(prefix, i), {out});
    }
}

void mlp_init(ParamStore &store, std::string_view prefix, const MlpSpec &spec, Rng &rng) {
    for (std::size_t i = 0; i < spec.num_layers(); ++i) {
        const bool last = i + 1 == spec.num_layers();
        const double gain = last ? 1.0 : 2.0;
        const double stddev = std::sqrt(gain / spec.fan_in(i));
        for (double &w : store.view(weight_name(prefix, i)))
            w = stddev * rng.normal();
        for (double &b : store.view(bias_name(prefix, i)))
            b = 0.0;
    }
}

Mat mlp_forward(const ParamStore &store, std::string_view prefix, const MlpSpec &spec,
                const Mat &input) {
    check_input(spec, input.cols());
    Mat h = input;
    for (std::size_t i = 0; i < spec.num_layers(); ++i) {
        const int in = spec.fan_in(i), out = spec.widths[i + 1];
        Eigen::Map<const Mat> W(store.view(weight_name(prefix, i)).data(), in, out);
        Eigen::Map<const Eigen::RowVectorXd> b(store.view(bias_name(prefix, i)).data(), out);
        if (spec.skip_layer && static_cast<std::size_t>(*spec.skip_layer) == i) {
            Mat joined(h.rows(), in);
            joined << h, input;
            h = joined;
        }
        Mat z = h * W;
        z.rowwise() += b;
        if (i + 1 < spec.num_layers())
            h = z.cwiseMax(0.0);
        else
            h = apply_output(std::move(z), spec.output);
    }
    return h;
}

std::vector<double> mlp_forward(const ParamStore &store, std::string_view prefix,
                                const MlpSpec &spec, std::span<const double> input) {
    Mat in = Eigen::Map<const Mat>(input.data(), 1, static_cast<Index>(input.size()));
    Mat out = mlp_forward(store, prefix, spec, in);
    return {out.data(), out.data() + out.size()};
}

Tape::Var mlp_forward(Tape &tape, const ParamStore &store, std::string_view prefix,
                      const MlpSpec &spec, Tape::Var input) {
    check_input(spec, tape.value(input).cols());
    Tape::Var h = input;
    for (std::size_t i = 0; i < spec.num_layers(); ++i) {
        const int in = spec.fan_in(i), out = spec.widths[i + 1];
        Tape::Var W = tape.param(store, weight_name(prefix, i), in, out);
        Tape::Var b = tape.param(store, bias_name(prefix, i), 1, out);
        if (spec.skip_layer && static_cast<std::size_t>(*spec.skip_layer) == i)
            h = tape.concat_cols(h, input);
        if (i + 1 < spec.num_layers())
            h = tape.affine(h, W, b, true);
        else
            h = apply_output(tape, tape.affine(h, W, b), spec.output);
    }
    return h;
}

}  // namespace nexf
