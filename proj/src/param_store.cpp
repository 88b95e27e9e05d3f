// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#include <nexf/param_store.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nexf {

std::size_t Segment::size() const {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                           std::multiplies<>());
}

std::size_t ParamStore::add(std::string name, std::vector<std::size_t> shape) {
    if (has(name))
        throw Error("duplicate parameter segment '" + name + "'");
    Segment seg{std::move(name), data_.size(), std::move(shape)};
    data_.resize(data_.size() + seg.size(), 0.0);
    segments_.push_back(std::move(seg));
    return segments_.back().offset;
}

bool ParamStore::has(std::string_view name) const {
    return std::any_of(segments_.begin(), segments_.end(),
                       [&](const Segment &s) { return s.name == name; });
}

const Segment &ParamStore::segment(std::string_view name) const {
    for (const Segment &s : segments_)
        if (s.name == name)
            return s;
    throw Error("unknown parameter segment '" + std::string(name) + "'");
}

std::span<double> ParamStore::view(std::string_view name) {
    const Segment &s = segment(name);
    return std::span<double>(data_).subspan(s.offset, s.size());
}

std::span<const double> ParamStore::view(std::string_view name) const {
    const Segment &s = segment(name);
    return std::span<const double>(data_).subspan(s.offset, s.size());
}

void ParamStore::validate() const {
    std::vector<const Segment *> order;
    for (const Segment &s : segments_)
        order.push_back(&s);
    std::sort(order.begin(), order.end(),
              [](const Segment *a, const Segment *b) { return a->offset < b->offset; });
    std::size_t cursor = 0;
    for (const Segment *s : order) {
        if (s->offset != cursor)
            throw Error("segment '" + s->name + "' leaves a gap or overlaps");
        cursor += s->size();
    }
    if (cursor != data_.size())
        throw Error("segments do not cover the parameter vector");
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (!std::isfinite(data_[i]))
            throw Error("non-finite parameter at index " + std::to_string(i));
}

ParamStore ParamStore::from_parts(std::vector<Segment> segments, std::vector<double> data) {
    ParamStore store;
    store.segments_ = std::move(segments);
    store.data_ = std::move(data);
    store.validate();
    return store;
}

}  // namespace nexf
