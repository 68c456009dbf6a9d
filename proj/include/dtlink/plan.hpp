// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// Retrieval plan: the stage-one output contract. A plan lists which sensors
// to pull, where they sit, the requested time window, and optionally how many
// bits the planner expects the pull to cost.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dtlink {

struct TimeRange {
    std::int64_t start_s = 0; // epoch seconds, inclusive
    std::int64_t end_s = 0;   // epoch seconds, exclusive

    double hours() const { return static_cast<double>(end_s - start_s) / 3600.0; }
};

struct PlanEntry {
    std::string sensor_id;
    std::string sensor_type;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    TimeRange time_range;
    std::optional<std::uint64_t> est_payload_bits;
};

struct RetrievalPlan {
    std::vector<PlanEntry> entries;
    std::string query;
};

inline constexpr int kPlanSchemaVersion = 1;

// throws parse_error on malformed JSON, validation_error on schema breaches
// (duplicate ids, empty time range, zero payload)
RetrievalPlan plan_from_json(const nlohmann::json& doc);
RetrievalPlan plan_from_text(const std::string& text);
nlohmann::ordered_json plan_to_json(const RetrievalPlan& plan);

// first balanced top-level {...} block in free text, or nullopt
std::optional<std::string> extract_json_object(const std::string& text);

} // namespace dtlink
