// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dtlink/channel.hpp"
#include "dtlink/geometry.hpp"

#include "json.hpp"

namespace dtlink {

struct IoTDevice {
    std::string id;
    Point position;
    std::uint64_t data_bits = 0; // payload held at edge storage
    std::string sensor_type;

    friend bool operator==(const IoTDevice&, const IoTDevice&) = default;
};

/// Fallback mesh link used when predicted cell load exceeds tau.
struct ZigbeeParams {
    double rate_bps = 250e3;       // nominal 2.4 GHz PHY rate
    double per_hop_latency_s = 5e-3;
    int hops = 1;

    void validate() const;
};

/// Immutable world description: one base station, its IoT devices, the RB
/// grid, channel constants and the operating limits. Shareable across
/// threads without synchronization once loaded.
struct Scenario {
    Point bs_position;
    std::vector<IoTDevice> devices;
    int cc_ue_count = 0; // conventional cellular UEs, background load only
    int num_rbs = 1;
    ChannelParams channel;
    FadingModel fading = FadingModel::rayleigh;
    InterferenceModel interference;
    double p_max_w = 0.1;  // per-device transmit power bound
    double beta = 1.0;     // SINR threshold, linear
    double tau = 0.5;      // traffic-load threshold, fraction of capacity
    ZigbeeParams zigbee;
    std::optional<LatLon> geo_origin; // plane origin for the convertor

    /// Throws validation_error naming the violated field.
    void validate() const;
};

/// Parses and fully validates a scenario config document. Powers are
/// accepted in dBm and stored in watts; beta is accepted in dB.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::ordered_json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

} // namespace dtlink
