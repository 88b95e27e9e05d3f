// Copyright 2026 The nexf Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "json_util.hpp"

#include <nexf/config.hpp>

#include <set>
#include <string>

namespace nexf {

// Strict view of a JSON object: reads optional keys and, on done(), rejects
// any key that was never read.
class Fields {
  public:
    Fields(const Json &j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object())
            throw ConfigError("'" + name() + "' must be a JSON object");
    }

    template <typename T> bool opt(const char *key, T &out) {
        seen_.insert(key);
        if (!j_.contains(key))
            return false;
        try {
            out = j_.at(key).get<T>();
        } catch (const Json::exception &) {
            throw ConfigError("field '" + path(key) + "' has the wrong type");
        }
        return true;
    }

    const Json *sub(const char *key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError("unknown key '" + path(it.key()) + "'");
    }

    std::string path(const std::string &key) const {
        return where_.empty() ? key : where_ + "." + key;
    }
    std::string name() const { return where_.empty() ? "<root>" : where_; }

  private:
    const Json &j_;
    std::string where_;
    std::set<std::string> seen_;
};

Json radiance_to_json(const RadianceFieldConfig &cfg, RadianceProfile profile, bool with_glo_count);
RadianceFieldConfig radiance_from_json(const Json &j, const std::string &where,
                                       RadianceProfile *profile);
Json exposure_field_to_json(const ExposureFieldConfig &cfg);
ExposureFieldConfig exposure_field_from_json(const Json &j, const std::string &where);
// TrainConfig without its weights and seed.
Json train_to_json(const TrainConfig &cfg);
void train_from_json(const Json &j, const std::string &where, TrainConfig &cfg);
Json weights_to_json(const WeightConfig &cfg);
WeightConfig weights_from_json(const Json &j, const std::string &where);
Json fusion_to_json(const FusionConfig &cfg);
FusionConfig fusion_from_json(const Json &j, const std::string &where);
TestConditioning conditioning_from_name(const std::string &name);

}  // namespace nexf
