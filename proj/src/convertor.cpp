// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/convertor.hpp"

#include <cmath>

namespace dtlink {

ConversionReport convert(const RetrievalPlan& plan, const SensorRegistry& registry,
                         LatLon origin) {
    ConversionReport report;
    report.projection_origin = origin;

    for (const auto& entry : plan.entries) {
        const auto* rec = registry.find(entry.sensor_id);
        if (rec == nullptr) {
            report.skipped.push_back({entry.sensor_id, "unregistered"});
            continue;
        }
        ConvertedDevice dev;
        dev.sensor_id = entry.sensor_id;
        dev.sensor_type = rec->type;
        dev.position_m = project_equirectangular({rec->lat_deg, rec->lon_deg}, origin);
        if (entry.est_payload_bits) {
            dev.data_bits = *entry.est_payload_bits;
        } else {
            const double bits = rec->records_per_hour * entry.time_range.hours() *
                                static_cast<double>(rec->record_bytes) * 8.0;
            dev.data_bits = static_cast<std::uint64_t>(std::llround(bits));
        }
        if (dev.data_bits == 0) {
            report.skipped.push_back({entry.sensor_id, "zero payload"});
            continue;
        }
        report.device_params.push_back(std::move(dev));
    }
    return report;
}

nlohmann::ordered_json report_to_json(const ConversionReport& report) {
    nlohmann::ordered_json doc;
    doc["projection_origin"] = {{"lat_deg", report.projection_origin.lat_deg},
                                {"lon_deg", report.projection_origin.lon_deg}};
    doc["device_params"] = nlohmann::ordered_json::array();
    for (const auto& dev : report.device_params) {
        doc["device_params"].push_back({{"sensor_id", dev.sensor_id},
                                        {"sensor_type", dev.sensor_type},
                                        {"x_m", dev.position_m.x_m},
                                        {"y_m", dev.position_m.y_m},
                                        {"data_bits", dev.data_bits}});
    }
    doc["skipped"] = nlohmann::ordered_json::array();
    for (const auto& skip : report.skipped) {
        doc["skipped"].push_back({{"sensor_id", skip.sensor_id}, {"reason", skip.reason}});
    }
    return doc;
}

} // namespace dtlink
