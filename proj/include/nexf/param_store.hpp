// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nexf {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A named, shaped slice of the flat parameter vector.
struct Segment {
    std::string name;
    std::size_t offset = 0;
    std::vector<std::size_t> shape;

    std::size_t size() const;
    bool operator==(const Segment &) const = default;
};

// Flat vector of doubles partitioned into disjoint named segments that
// cover it exactly. Segments are appended in registration order.
class ParamStore {
  public:
    // Appends a zero-filled segment and returns its offset.
    std::size_t add(std::string name, std::vector<std::size_t> shape);

    bool has(std::string_view name) const;
    const Segment &segment(std::string_view name) const;
    const std::vector<Segment> &segments() const { return segments_; }

    std::span<double> view(std::string_view name);
    std::span<const double> view(std::string_view name) const;

    std::vector<double> &data() { return data_; }
    const std::vector<double> &data() const { return data_; }
    std::size_t size() const { return data_.size(); }

    // Checks disjoint exact coverage and finiteness; throws Error otherwise.
    void validate() const;

    // Rebuilds a store from an explicit segment table and payload.
    static ParamStore from_parts(std::vector<Segment> segments, std::vector<double> data);

    bool operator==(const ParamStore &) const = default;

  private:
    std::vector<Segment> segments_;
    std::vector<double> data_;
};

}  // namespace nexf
