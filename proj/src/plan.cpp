// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/plan.hpp"

#include <set>

#include "dtlink/errors.hpp"

namespace dtlink {

RetrievalPlan plan_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw parse_error("plan: expected a JSON object");
    }
    if (!doc.contains("version") || !doc.at("version").is_number_integer() ||
        doc.at("version").get<int>() != kPlanSchemaVersion) {
        throw validation_error("plan.version",
                               "missing or unsupported plan schema version (expected " +
                                   std::to_string(kPlanSchemaVersion) + ")");
    }
    if (!doc.contains("entries") || !doc.at("entries").is_array() ||
        doc.at("entries").empty()) {
        throw validation_error("plan.entries", "plan must list at least one entry");
    }

    RetrievalPlan plan;
    if (doc.contains("query")) {
        plan.query = doc.at("query").get<std::string>();
    }

    std::set<std::string> seen;
    for (const auto& item : doc.at("entries")) {
        PlanEntry entry;
        try {
            entry.sensor_id = item.at("sensor_id").get<std::string>();
            entry.sensor_type = item.at("sensor_type").get<std::string>();
            entry.lat_deg = item.at("lat_deg").get<double>();
            entry.lon_deg = item.at("lon_deg").get<double>();
            entry.time_range.start_s = item.at("time_range").at("start_s").get<std::int64_t>();
            entry.time_range.end_s = item.at("time_range").at("end_s").get<std::int64_t>();
        } catch (const nlohmann::json::exception& e) {
            throw validation_error("plan.entries", std::string("entry malformed: ") + e.what());
        }
        if (entry.sensor_id.empty()) {
            throw validation_error("plan.entries", "entry with empty sensor_id");
        }
        if (!seen.insert(entry.sensor_id).second) {
            throw validation_error("plan.entries",
                                   "duplicate sensor_id '" + entry.sensor_id + "'");
        }
        if (entry.time_range.start_s >= entry.time_range.end_s) {
            throw validation_error("plan.entries", "sensor '" + entry.sensor_id +
                                                       "' has an empty time range");
        }
        if (item.contains("est_payload_bits")) {
            const auto bits = item.at("est_payload_bits").get<std::int64_t>();
            if (bits <= 0) {
                throw validation_error("plan.entries",
                                       "sensor '" + entry.sensor_id +
                                           "' has non-positive est_payload_bits");
            }
            entry.est_payload_bits = static_cast<std::uint64_t>(bits);
        }
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

RetrievalPlan plan_from_text(const std::string& text) {
    auto block = extract_json_object(text);
    if (!block) {
        throw parse_error("plan: no JSON object found in text");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(*block);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("plan: ") + e.what());
    }
    return plan_from_json(doc);
}

nlohmann::ordered_json plan_to_json(const RetrievalPlan& plan) {
    nlohmann::ordered_json doc;
    doc["version"] = kPlanSchemaVersion;
    doc["query"] = plan.query;
    doc["entries"] = nlohmann::ordered_json::array();
    for (const auto& entry : plan.entries) {
        nlohmann::ordered_json e;
        e["sensor_id"] = entry.sensor_id;
        e["sensor_type"] = entry.sensor_type;
        e["lat_deg"] = entry.lat_deg;
        e["lon_deg"] = entry.lon_deg;
        e["time_range"] = {{"start_s", entry.time_range.start_s},
                           {"end_s", entry.time_range.end_s}};
        if (entry.est_payload_bits) {
            e["est_payload_bits"] = *entry.est_payload_bits;
        }
        doc["entries"].push_back(std::move(e));
    }
    return doc;
}

std::optional<std::string> extract_json_object(const std::string& text) {
    const auto start = text.find('{');
    if (start == std::string::npos) {
        return std::nullopt;
    }
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            --depth;
            if (depth == 0) {
                return text.substr(start, i - start + 1);
            }
        }
    }
    return std::nullopt;
}

} // namespace dtlink
