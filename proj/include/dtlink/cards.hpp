// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// Capability cards describe what the data-plane can offer: which sensor
// families exist and which tool APIs the agents may call. Cards are rendered
// into agent prompts verbatim, so keep descriptions one line each.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dtlink {

struct SensorCard {
    std::string sensor_type;
    std::string description;
    std::string unit;
};

struct ApiParam {
    std::string name;
    std::string type;
};

struct DataApiCard {
    std::string name;
    std::string signature;
    std::string description;
    std::vector<ApiParam> params;
};

struct CardSet {
    std::vector<SensorCard> sensors;
    std::vector<DataApiCard> apis;

    // throws validation_error on duplicate types/names or empty fields
    void validate() const;

    // plain-text block for inclusion in agent system prompts
    std::string render() const;
};

CardSet load_sensor_cards(const std::filesystem::path& path);
CardSet load_cards(const std::filesystem::path& sensors_path,
                   const std::filesystem::path& apis_path);

} // namespace dtlink
