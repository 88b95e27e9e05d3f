// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/tape.hpp>

#include <cmath>

namespace nexf {

namespace {

void check_same_shape(const Mat &a, const Mat &b, const char *op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + ")");
}

double softplus_scalar(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid_scalar(double x) {
    if (x >= 0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Tape::Var Tape::push(Mat value, bool requires_grad, Backward backward, const char *op) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    n.op = op;
    if (requires_grad)
        n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size() - 1)};
}

void Tape::accumulate(Var v, const Mat &g) {
    Node &n = nodes_[v.id];
    if (!n.requires_grad)
        return;
    if (n.grad.size() == 0)
        n.grad = g;
    else
        n.grad += g;
}

void Tape::accumulate(Var v, Mat &&g) {
    Node &n = nodes_[v.id];
    if (!n.requires_grad)
        return;
    if (n.grad.size() == 0)
        n.grad = std::move(g);
    else
        n.grad += g;
}

void Tape::check_finite() const {
    for (const Node &n : nodes_)
        if (!n.value.allFinite())
            throw NonFiniteError(n.op);
}

Tape::Var Tape::constant(Mat value) {
    return push(std::move(value), false, nullptr, "constant");
}

Tape::Var Tape::param(const ParamStore &store, std::string_view segment, Index rows,
                      Index cols) {
    const Segment &seg = store.segment(segment);
    if (static_cast<std::size_t>(rows * cols) != seg.size())
        throw Error("param '" + seg.name + "': requested shape does not match segment size");
    Mat value = Eigen::Map<const Mat>(store.data().data() + seg.offset, rows, cols);
    Var v = push(std::move(value), true, nullptr, "param");
    nodes_[v.id].param_offset = static_cast<std::ptrdiff_t>(seg.offset);
    return v;
}

Tape::Var Tape::matmul(Var a, Var b) {
    const Mat &A = value(a), &B = value(b);
    if (A.cols() != B.rows())
        throw Error("matmul: inner dimensions differ (" + std::to_string(A.cols()) + " vs " +
                    std::to_string(B.rows()) + ")");
    return push(A * B, requires_grad(a) || requires_grad(b),
                [a, b](Tape &t, const Mat &g) {
                    if (t.requires_grad(a))
                        t.accumulate(a, g * t.value(b).transpose());
                    if (t.requires_grad(b))
                        t.accumulate(b, t.value(a).transpose() * g);
                },
                "matmul");
}

Tape::Var Tape::affine(Var x, Var W, Var b, bool relu) {
    const Mat &X = value(x), &Wm = value(W), &B = value(b);
    if (X.cols() != Wm.rows())
        throw Error("affine: inner dimensions differ (" + std::to_string(X.cols()) + " vs " +
                    std::to_string(Wm.rows()) + ")");
    if (B.rows() != 1 || B.cols() != Wm.cols())
        throw Error("affine: bias must be 1 x cols(W)");
    Mat out(X.rows(), Wm.cols());
    out.noalias() = X * Wm;
    out.rowwise() += B.row(0);
    if (relu)
        out = out.cwiseMax(0.0);
    Var v = push(std::move(out), requires_grad(x) || requires_grad(W) || requires_grad(b), nullptr,
                 relu ? "affine_relu" : "affine");
    if (!nodes_[v.id].requires_grad)
        return v;
    const int self = v.id;
    nodes_[self].backward = [x, W, b, relu, self](Tape &t, const Mat &g) {
        Mat masked;
        if (relu)
            masked = (t.nodes_[self].value.array() > 0.0).select(g, 0.0);
        const Mat &gz = relu ? masked : g;
        if (t.requires_grad(x)) {
            Mat gx(gz.rows(), t.value(W).rows());
            gx.noalias() = gz * t.value(W).transpose();
            t.accumulate(x, std::move(gx));
        }
        if (t.requires_grad(W)) {
            Mat gw(t.value(W).rows(), t.value(W).cols());
            gw.noalias() = t.value(x).transpose() * gz;
            t.accumulate(W, std::move(gw));
        }
        if (t.requires_grad(b))
            t.accumulate(b, Mat(gz.colwise().sum()));
    };
    return v;
}

Tape::Var Tape::add_row(Var a, Var row) {
    const Mat &A = value(a), &R = value(row);
    if (R.rows() != 1 || R.cols() != A.cols())
        throw Error("add_row: row must be 1 x cols(a)");
    Mat out = A.rowwise() + R.row(0);
    return push(std::move(out), requires_grad(a) || requires_grad(row),
                [a, row](Tape &t, const Mat &g) {
                    t.accumulate(a, g);
                    t.accumulate(row, g.colwise().sum());
                },
                "add_row");
}

Tape::Var Tape::add_col(Var a, Var col) {
    const Mat &A = value(a), &C = value(col);
    if (C.cols() != 1 || C.rows() != A.rows())
        throw Error("add_col: column must be rows(a) x 1");
    Mat out = A.colwise() + C.col(0);
    return push(std::move(out), requires_grad(a) || requires_grad(col),
                [a, col](Tape &t, const Mat &g) {
                    t.accumulate(a, g);
                    t.accumulate(col, g.rowwise().sum());
                },
                "add_col");
}

Tape::Var Tape::add(Var a, Var b) {
    check_same_shape(value(a), value(b), "add");
    return push(value(a) + value(b), requires_grad(a) || requires_grad(b),
                [a, b](Tape &t, const Mat &g) {
                    t.accumulate(a, g);
                    t.accumulate(b, g);
                },
                "add");
}

Tape::Var Tape::sub(Var a, Var b) {
    check_same_shape(value(a), value(b), "sub");
    return push(value(a) - value(b), requires_grad(a) || requires_grad(b),
                [a, b](Tape &t, const Mat &g) {
                    t.accumulate(a, g);
                    if (t.requires_grad(b))
                        t.accumulate(b, -g);
                },
                "sub");
}

Tape::Var Tape::mul(Var a, Var b) {
    check_same_shape(value(a), value(b), "mul");
    return push(value(a).cwiseProduct(value(b)), requires_grad(a) || requires_grad(b),
                [a, b](Tape &t, const Mat &g) {
                    if (t.requires_grad(a))
                        t.accumulate(a, g.cwiseProduct(t.value(b)));
                    if (t.requires_grad(b))
                        t.accumulate(b, g.cwiseProduct(t.value(a)));
                },
                "mul");
}

Tape::Var Tape::scale(Var a, double s) {
    return push(value(a) * s, requires_grad(a),
                [a, s](Tape &t, const Mat &g) { t.accumulate(a, g * s); }, "scale");
}

Tape::Var Tape::shift(Var a, double s) {
    return push(value(a).array() + s, requires_grad(a),
                [a](Tape &t, const Mat &g) { t.accumulate(a, g); }, "shift");
}

Tape::Var Tape::relu(Var a) {
    return push(value(a).cwiseMax(0.0), requires_grad(a),
                [a](Tape &t, const Mat &g) {
                    t.accumulate(a, (t.value(a).array() > 0.0).select(g, 0.0));
                },
                "relu");
}

Tape::Var Tape::softplus(Var a) {
    return push(value(a).unaryExpr(&softplus_scalar), requires_grad(a),
                [a](Tape &t, const Mat &g) {
                    t.accumulate(a, g.cwiseProduct(t.value(a).unaryExpr(&sigmoid_scalar)));
                },
                "softplus");
}

Tape::Var Tape::sigmoid(Var a) {
    Var out = push(value(a).unaryExpr(&sigmoid_scalar), requires_grad(a), nullptr, "sigmoid");
    if (requires_grad(a)) {
        const int self = out.id;
        nodes_[self].backward = [a, self](Tape &t, const Mat &g) {
            const Mat &s = t.nodes_[self].value;
            t.accumulate(a, g.array() * s.array() * (1.0 - s.array()));
        };
    }
    return out;
}

Tape::Var Tape::exp(Var a) {
    Var out = push(value(a).array().exp(), requires_grad(a), nullptr, "exp");
    if (requires_grad(a)) {
        const int self = out.id;
        nodes_[self].backward = [a, self](Tape &t, const Mat &g) {
            t.accumulate(a, g.cwiseProduct(t.nodes_[self].value));
        };
    }
    return out;
}

Tape::Var Tape::square(Var a) {
    return push(value(a).array().square(), requires_grad(a),
                [a](Tape &t, const Mat &g) {
                    t.accumulate(a, 2.0 * g.cwiseProduct(t.value(a)));
                },
                "square");
}

Tape::Var Tape::slice_cols(Var a, Index start, Index count) {
    const Mat &A = value(a);
    if (start < 0 || count < 0 || start + count > A.cols())
        throw Error("slice_cols: range out of bounds");
    const Index total = A.cols();
    return push(A.middleCols(start, count), requires_grad(a),
                [a, start, count, total](Tape &t, const Mat &g) {
                    Mat full = Mat::Zero(g.rows(), total);
                    full.middleCols(start, count) = g;
                    t.accumulate(a, full);
                },
                "slice_cols");
}

Tape::Var Tape::concat_cols(Var a, Var b) {
    const Mat &A = value(a), &B = value(b);
    if (A.rows() != B.rows())
        throw Error("concat_cols: row counts differ");
    Mat out(A.rows(), A.cols() + B.cols());
    out << A, B;
    const Index ka = A.cols(), kb = B.cols();
    return push(std::move(out), requires_grad(a) || requires_grad(b),
                [a, b, ka, kb](Tape &t, const Mat &g) {
                    if (t.requires_grad(a))
                        t.accumulate(a, g.leftCols(ka));
                    if (t.requires_grad(b))
                        t.accumulate(b, g.rightCols(kb));
                },
                "concat_cols");
}

Tape::Var Tape::gather_rows(Var table, std::vector<int> rows) {
    const Mat &T = value(table);
    Mat out(static_cast<Index>(rows.size()), T.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 0 || rows[i] >= T.rows())
            throw Error("gather_rows: index out of range");
        out.row(static_cast<Index>(i)) = T.row(rows[i]);
    }
    const Index table_rows = T.rows();
    return push(std::move(out), requires_grad(table),
                [table, rows = std::move(rows), table_rows](Tape &t, const Mat &g) {
                    Mat acc = Mat::Zero(table_rows, g.cols());
                    for (std::size_t i = 0; i < rows.size(); ++i)
                        acc.row(rows[i]) += g.row(static_cast<Index>(i));
                    t.accumulate(table, acc);
                },
                "gather_rows");
}

Tape::Var Tape::reshape(Var a, Index rows, Index cols) {
    const Mat &A = value(a);
    if (rows * cols != A.size())
        throw Error("reshape: element count changes");
    const Index r0 = A.rows(), c0 = A.cols();
    Mat out = Eigen::Map<const Mat>(A.data(), rows, cols);
    return push(std::move(out), requires_grad(a),
                [a, r0, c0](Tape &t, const Mat &g) {
                    t.accumulate(a, Eigen::Map<const Mat>(g.data(), r0, c0));
                },
                "reshape");
}

Tape::Var Tape::cumsum_exclusive_rows(Var a) {
    const Mat &A = value(a);
    Mat out(A.rows(), A.cols());
    for (Index r = 0; r < A.rows(); ++r) {
        double run = 0.0;
        for (Index c = 0; c < A.cols(); ++c) {
            out(r, c) = run;
            run += A(r, c);
        }
    }
    return push(std::move(out), requires_grad(a),
                [a](Tape &t, const Mat &g) {
                    // d out(r, j) / d a(r, k) = [k < j], so the adjoint is a
                    // reverse exclusive cumulative sum.
                    Mat ga(g.rows(), g.cols());
                    for (Index r = 0; r < g.rows(); ++r) {
                        double run = 0.0;
                        for (Index c = g.cols() - 1; c >= 0; --c) {
                            ga(r, c) = run;
                            run += g(r, c);
                        }
                    }
                    t.accumulate(a, ga);
                },
                "cumsum_exclusive_rows");
}

Tape::Var Tape::weighted_sum(Var weights, Var values) {
    const Mat &W = value(weights), &V = value(values);
    const Index R = W.rows(), S = W.cols(), K = V.cols();
    if (V.rows() != R * S)
        throw Error("weighted_sum: values must have rows(weights) * cols(weights) rows");
    Mat out = Mat::Zero(R, K);
    for (Index r = 0; r < R; ++r)
        for (Index s = 0; s < S; ++s)
            out.row(r) += W(r, s) * V.row(r * S + s);
    return push(std::move(out), requires_grad(weights) || requires_grad(values),
                [weights, values, R, S, K](Tape &t, const Mat &g) {
                    if (t.requires_grad(weights)) {
                        const Mat &Vv = t.value(values);
                        Mat gw(R, S);
                        for (Index r = 0; r < R; ++r)
                            for (Index s = 0; s < S; ++s)
                                gw(r, s) = g.row(r).dot(Vv.row(r * S + s));
                        t.accumulate(weights, gw);
                    }
                    if (t.requires_grad(values)) {
                        const Mat &Wv = t.value(weights);
                        Mat gv(R * S, K);
                        for (Index r = 0; r < R; ++r)
                            for (Index s = 0; s < S; ++s)
                                gv.row(r * S + s) = Wv(r, s) * g.row(r);
                        t.accumulate(values, gv);
                    }
                },
                "weighted_sum");
}

Tape::Var Tape::sum(Var a) {
    Mat out(1, 1);
    out(0, 0) = value(a).sum();
    const Index r = value(a).rows(), c = value(a).cols();
    return push(std::move(out), requires_grad(a),
                [a, r, c](Tape &t, const Mat &g) {
                    t.accumulate(a, Mat::Constant(r, c, g(0, 0)));
                },
                "sum");
}

Tape::Var Tape::detach(Var a) {
    return push(value(a), false, nullptr, "detach");
}

std::vector<double> Tape::gradient(Var loss, std::size_t param_count) {
    if (value(loss).size() != 1)
        throw Error("gradient: loss must be a scalar");
    if (!value(loss).allFinite()) {
        check_finite();
        throw NonFiniteError(nodes_[loss.id].op);
    }
    for (Node &n : nodes_)
        n.grad.resize(0, 0);
    std::vector<double> out(param_count, 0.0);
    if (!requires_grad(loss))
        return out;
    nodes_[loss.id].grad = Mat::Ones(1, 1);
    for (int id = loss.id; id >= 0; --id) {
        Node &n = nodes_[id];
        if (!n.requires_grad || n.grad.size() == 0)
            continue;
        if (n.param_offset >= 0) {
            const auto off = static_cast<std::size_t>(n.param_offset);
            if (off + static_cast<std::size_t>(n.grad.size()) > param_count)
                throw Error("gradient: parameter vector shorter than tape parameters");
            for (Index i = 0; i < n.grad.size(); ++i)
                out[off + static_cast<std::size_t>(i)] += n.grad.data()[i];
        } else if (n.backward) {
            // Backward only touches earlier nodes, so the adjoint can be
            // moved out and restored afterwards.
            Mat g = std::move(n.grad);
            n.backward(*this, g);
            nodes_[id].grad = std::move(g);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!std::isfinite(out[i]))
            throw NonFiniteError("gradient");
    return out;
}

Mat Tape::adjoint(Var v) const {
    const Node &n = nodes_[v.id];
    if (n.grad.size() == 0)
        return Mat::Zero(n.value.rows(), n.value.cols());
    return n.grad;
}

}  // namespace nexf
