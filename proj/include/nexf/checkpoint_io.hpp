// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <nexf/param_store.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace nexf {

// On-disk layout, all integers and floats little-endian:
//
//   "NEXF"                       4-byte magic
//   u32 version                  kCheckpointVersion
//   u32 segment_count
//   segment_count x { u32 name_len, name, u64 offset, u32 rank, rank x u64 dim }
//   u64 value_count, value_count x f64
//   u64 meta_len, meta bytes     free-form text (JSON for training checkpoints)
//   u32 extra_count
//   extra_count x { u32 name_len, name, u64 len, len x f64 }
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct ParamFile {
    ParamStore params;
    std::string meta;
    std::map<std::string, std::vector<double>> extras;

    bool operator==(const ParamFile &) const = default;
};

void write_param_file(const std::filesystem::path &path, const ParamFile &file);
ParamFile read_param_file(const std::filesystem::path &path);

}  // namespace nexf
