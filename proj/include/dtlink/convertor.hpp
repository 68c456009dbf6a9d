// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// Parameter convertor: turns a retrieval plan plus the sensor registry into
// the numeric device parameters the radio stage consumes. Registry
// coordinates are authoritative; plan entries missing from the registry are
// reported, not dropped silently.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtlink/geometry.hpp"
#include "dtlink/plan.hpp"
#include "dtlink/registry.hpp"

#include "json.hpp"

namespace dtlink {

struct ConvertedDevice {
    std::string sensor_id;
    Point position_m;
    std::uint64_t data_bits = 0;
    std::string sensor_type;
};

struct SkippedEntry {
    std::string sensor_id;
    std::string reason;
};

struct ConversionReport {
    std::vector<ConvertedDevice> device_params;
    std::vector<SkippedEntry> skipped;
    LatLon projection_origin;
};

// Order-preserving: device_params and skipped together cover plan.entries
// exactly once, in plan order. data_bits defaults to
// records_per_hour x hours x record_bytes x 8 and is overridden by the
// plan's est_payload_bits when present.
ConversionReport convert(const RetrievalPlan& plan, const SensorRegistry& registry,
                         LatLon origin);

nlohmann::ordered_json report_to_json(const ConversionReport& report);

} // namespace dtlink
