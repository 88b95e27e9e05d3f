// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/fields.hpp>

#include <cmath>

namespace nexf {

namespace {

std::vector<int> stack(int in, const std::vector<int> &hidden, int out) {
    std::vector<int> w{in};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(out);
    return w;
}

Mat log_column(double exposure, Index n) {
    if (!(exposure > 0.0))
        throw Error("radiance_forward: exposure must be positive");
    return Mat::Constant(n, 1, std::log(exposure));
}

void check_points(const Mat &x, const Mat &d, const Mat &log_exposure, std::size_t glo_count) {
    if (x.cols() != 3 || d.cols() != 3 || d.rows() != x.rows())
        throw Error("radiance_forward: x and d must be n x 3");
    if (log_exposure.rows() != x.rows() || log_exposure.cols() != 1)
        throw Error("radiance_forward: log exposure must be n x 1");
    if (!log_exposure.allFinite())
        throw Error("radiance_forward: exposure must be positive");
    if (glo_count != 0 && glo_count != static_cast<std::size_t>(x.rows()))
        throw Error("radiance_forward: need one GLO index per point");
}

}  // namespace

RadianceFieldConfig RadianceFieldConfig::profile(RadianceProfile p) {
    RadianceFieldConfig cfg;
    if (p == RadianceProfile::forward_facing) {
        cfg.posenc_levels_x = 6;
        cfg.posenc_levels_d = 2;
        cfg.bottleneck_dim = 15;
        cfg.pos_hidden = {64, 64};
        cfg.view_hidden = {64, 64};
        cfg.view_skip = false;
    }
    return cfg;
}

MlpSpec RadianceFieldConfig::pos_spec() const {
    MlpSpec s;
    s.widths = stack(static_cast<int>(posenc_dim(posenc_levels_x)), pos_hidden, bottleneck_dim + 1);
    return s;
}

MlpSpec RadianceFieldConfig::view_spec() const {
    MlpSpec s;
    s.widths = stack(bottleneck_dim + static_cast<int>(posenc_dim(posenc_levels_d)), view_hidden, 3);
    s.output = OutputActivation::sigmoid;
    if (view_skip && view_hidden.size() >= 1)
        s.skip_layer = 1;
    return s;
}

void RadianceFieldConfig::validate() const {
    if (posenc_levels_x < 0 || posenc_levels_d < 0)
        throw Error("radiance field: posenc levels must be >= 0");
    if (bottleneck_dim < 1)
        throw Error("radiance field: bottleneck_dim must be >= 1");
    if (glo_count < 0)
        throw Error("radiance field: glo_count must be >= 0");
    pos_spec().validate();
    view_spec().validate();
}

MlpSpec ExposureFieldConfig::spec() const {
    MlpSpec s;
    s.widths = stack(static_cast<int>(posenc_dim(posenc_levels)), hidden, 1);
    s.output = OutputActivation::softplus;
    return s;
}

void ExposureFieldConfig::validate() const {
    if (posenc_levels < 0)
        throw Error("exposure field: posenc levels must be >= 0");
    spec().validate();
}

bool is_radiance_segment(const std::string &name) {
    return name.rfind("radiance.", 0) == 0;
}

void register_radiance_field(ParamStore &store, const RadianceFieldConfig &cfg) {
    cfg.validate();
    mlp_register(store, kPosPrefix, cfg.pos_spec());
    mlp_register(store, kViewPrefix, cfg.view_spec());
    if (cfg.glo && cfg.glo_count > 0) {
        const auto n = static_cast<std::size_t>(cfg.glo_count);
        const auto k = static_cast<std::size_t>(cfg.bottleneck_dim);
        store.add(kGloScale, {n, k});
        store.add(kGloShift, {n, k});
    }
}

void register_exposure_field(ParamStore &store, const ExposureFieldConfig &cfg) {
    cfg.validate();
    mlp_register(store, kExposurePrefix, cfg.spec());
}

void init_radiance_field(ParamStore &store, const RadianceFieldConfig &cfg, Rng &rng) {
    mlp_init(store, kPosPrefix, cfg.pos_spec(), rng);
    mlp_init(store, kViewPrefix, cfg.view_spec(), rng);
    if (store.has(kGloScale)) {
        for (double &v : store.view(kGloScale))
            v = 0.0;
        for (double &v : store.view(kGloShift))
            v = 0.0;
    }
}

void init_exposure_field(ParamStore &store, const ExposureFieldConfig &cfg, Rng &rng) {
    mlp_init(store, kExposurePrefix, cfg.spec(), rng);
}

RadianceBatch radiance_forward(const ParamStore &store, const RadianceFieldConfig &cfg,
                               const Mat &x, const Mat &d, const Mat &log_exposure,
                               std::span<const int> glo_index) {
    check_points(x, d, log_exposure, glo_index.size());
    const Index k = cfg.bottleneck_dim;
    const Mat pos = mlp_forward(store, kPosPrefix, cfg.pos_spec(), posenc(x, cfg.posenc_levels_x));
    RadianceBatch out;
    out.sigma = pos.rightCols(1).unaryExpr(
        [](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); });
    Mat b = pos.leftCols(k);
    b.colwise() += log_exposure.col(0);
    if (!glo_index.empty() && store.has(kGloScale)) {
        const Segment &sc = store.segment(kGloScale);
        const auto rows = static_cast<Index>(sc.shape[0]);
        Eigen::Map<const Mat> scale(store.view(kGloScale).data(), rows, k);
        Eigen::Map<const Mat> shift(store.view(kGloShift).data(), rows, k);
        for (Index i = 0; i < b.rows(); ++i) {
            const int g = glo_index[static_cast<std::size_t>(i)];
            if (g < 0 || g >= rows)
                throw Error("radiance_forward: GLO index out of range");
            b.row(i) = b.row(i).cwiseProduct((scale.row(g).array() + 1.0).matrix()) + shift.row(g);
        }
    }
    Mat view_in(b.rows(), k + posenc_dim(cfg.posenc_levels_d));
    view_in << b, posenc(d, cfg.posenc_levels_d);
    out.color = mlp_forward(store, kViewPrefix, cfg.view_spec(), view_in);
    out.bottleneck = std::move(b);
    return out;
}

RadianceSample radiance_forward(const ParamStore &store, const RadianceFieldConfig &cfg,
                                const Vec3 &x, const Vec3 &d, double exposure,
                                std::optional<int> glo_index) {
    const Mat xm = x.transpose();
    const Mat dm = d.transpose();
    std::vector<int> glo;
    if (glo_index)
        glo.push_back(*glo_index);
    const RadianceBatch b = radiance_forward(store, cfg, xm, dm, log_column(exposure, 1), glo);
    RadianceSample s;
    s.sigma = b.sigma(0, 0);
    s.color = b.color.row(0).transpose();
    s.bottleneck.assign(b.bottleneck.data(), b.bottleneck.data() + b.bottleneck.size());
    return s;
}

RadianceVars radiance_forward(Tape &tape, const ParamStore &store,
                              const RadianceFieldConfig &cfg, const Mat &x, const Mat &d,
                              const Mat &log_exposure, std::span<const int> glo_index) {
    check_points(x, d, log_exposure, glo_index.size());
    const Index k = cfg.bottleneck_dim;
    Tape::Var enc = tape.constant(posenc(x, cfg.posenc_levels_x));
    Tape::Var pos = mlp_forward(tape, store, kPosPrefix, cfg.pos_spec(), enc);
    RadianceVars out;
    out.sigma = tape.softplus(tape.slice_cols(pos, k, 1));
    Tape::Var b = tape.add_col(tape.slice_cols(pos, 0, k), tape.constant(log_exposure));
    if (!glo_index.empty() && store.has(kGloScale)) {
        const auto rows = static_cast<Index>(store.segment(kGloScale).shape[0]);
        std::vector<int> idx(glo_index.begin(), glo_index.end());
        Tape::Var scale = tape.gather_rows(tape.param(store, kGloScale, rows, k), idx);
        Tape::Var shift = tape.gather_rows(tape.param(store, kGloShift, rows, k), idx);
        b = tape.add(tape.add(b, tape.mul(b, scale)), shift);
    }
    Tape::Var view_in = tape.concat_cols(b, tape.constant(posenc(d, cfg.posenc_levels_d)));
    out.color = mlp_forward(tape, store, kViewPrefix, cfg.view_spec(), view_in);
    out.bottleneck = b;
    return out;
}

Mat exposure_forward(const ParamStore &store, const ExposureFieldConfig &cfg, const Mat &x) {
    return mlp_forward(store, kExposurePrefix, cfg.spec(), posenc(x, cfg.posenc_levels));
}

double exposure_forward(const ParamStore &store, const ExposureFieldConfig &cfg, const Vec3 &x) {
    const Mat xm = x.transpose();
    return exposure_forward(store, cfg, xm)(0, 0);
}

Tape::Var exposure_forward(Tape &tape, const ParamStore &store, const ExposureFieldConfig &cfg,
                           const Mat &x) {
    return mlp_forward(tape, store, kExposurePrefix, cfg.spec(),
                       tape.constant(posenc(x, cfg.posenc_levels)));
}

double exposure_diff(const ParamStore &store, const ExposureFieldConfig &cfg, const Vec3 &x,
                     const Vec3 &eps) {
    const double a = exposure_forward(store, cfg, x);
    const double b = exposure_forward(store, cfg, Vec3(x + eps));
    return (a - b) * (a - b);
}

}  // namespace nexf
