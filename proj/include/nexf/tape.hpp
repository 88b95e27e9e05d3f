// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/param_store.hpp>

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nexf {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

// Thrown when an operation produces NaN or infinity; what() names the op.
class NonFiniteError : public Error {
  public:
    explicit NonFiniteError(std::string op)
        : Error("non-finite value produced by '" + op + "'"), op_(std::move(op)) {}
    const std::string &op() const { return op_; }

  private:
    std::string op_;
};

// Reverse-mode automatic differentiation over dense row-major matrices.
//
// Every operation appends a node holding its value; gradient() walks the
// nodes in reverse and accumulates adjoints. Parameter leaves remember their
// offset in the ParamStore so the result is a flat gradient vector aligned
// with the store. Matrices are batch-major: one row per sample point.
class Tape {
  public:
    struct Var {
        int id = -1;
    };

    Var constant(Mat value);
    // Leaf viewing a store segment as a rows x cols matrix (row-major).
    Var param(const ParamStore &store, std::string_view segment, Index rows, Index cols);

    const Mat &value(Var v) const { return nodes_[v.id].value; }
    double scalar(Var v) const { return nodes_[v.id].value(0, 0); }
    bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }

    Var matmul(Var a, Var b);
    // x W + b with b a 1 x k row; optionally followed by max(., 0).
    Var affine(Var x, Var W, Var b, bool relu = false);
    // a (n x k) plus a 1 x k row broadcast down the rows.
    Var add_row(Var a, Var row);
    // a (n x k) plus an n x 1 column broadcast across the columns.
    Var add_col(Var a, Var col);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    Var shift(Var a, double s);
    Var relu(Var a);
    Var softplus(Var a);
    Var sigmoid(Var a);
    Var exp(Var a);
    Var square(Var a);
    Var slice_cols(Var a, Index start, Index count);
    Var concat_cols(Var a, Var b);
    Var gather_rows(Var table, std::vector<int> rows);
    // Reinterprets the row-major storage with a new shape.
    Var reshape(Var a, Index rows, Index cols);
    // out(r, j) = sum_{k < j} a(r, k)
    Var cumsum_exclusive_rows(Var a);
    // weights: R x S, values: (R*S) x k laid out ray-major -> R x k.
    Var weighted_sum(Var weights, Var values);
    Var sum(Var a);
    // Same value, no gradient flows through.
    Var detach(Var a);

    // Adjoint of a 1 x 1 loss with respect to the parameter vector. A
    // non-finite loss throws NonFiniteError naming the first operation that
    // produced a NaN or infinity.
    std::vector<double> gradient(Var loss, std::size_t param_count);
    // Throws NonFiniteError for the first recorded non-finite value.
    void check_finite() const;
    // Adjoint of an arbitrary node after gradient() ran (zeros if untouched).
    Mat adjoint(Var v) const;

    std::size_t size() const { return nodes_.size(); }

  private:
    using Backward = std::function<void(Tape &, const Mat &grad)>;

    struct Node {
        Mat value;
        Mat grad;
        Backward backward;
        bool requires_grad = false;
        std::ptrdiff_t param_offset = -1;
        const char *op = "";
    };

    Var push(Mat value, bool requires_grad, Backward backward, const char *op);
    void accumulate(Var v, const Mat &g);
    void accumulate(Var v, Mat &&g);

    std::vector<Node> nodes_;
};

}  // namespace nexf
