// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtlink/geometry.hpp"

namespace dtlink {

/// One row of the sensor registry CSV:
/// sensor_id,type,lat,lon,record_bytes,records_per_hour
struct SensorRecord {
    std::string sensor_id;
    std::string type;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    std::uint64_t record_bytes = 0;
    double records_per_hour = 0.0;
};

/// Read-only lookup over the registered sensors of a deployment.
class SensorRegistry {
public:
    static SensorRegistry load_csv(const std::filesystem::path& path);

    void add(SensorRecord record);

    const SensorRecord* find(const std::string& sensor_id) const;
    std::vector<const SensorRecord*> by_type(const std::string& type) const;
    std::vector<const SensorRecord*> within_radius(LatLon center, double radius_km) const;

    const std::vector<SensorRecord>& records() const noexcept { return records_; }
    bool empty() const noexcept { return records_.empty(); }

    /// Mean of all registered positions; a always-in-bounds projection origin.
    LatLon centroid() const;

private:
    std::vector<SensorRecord> records_;
    std::map<std::string, std::size_t> index_;
};

/// Place-name to coordinates fixture used by the geocoding tool.
struct Gazetteer {
    std::map<std::string, LatLon> places;

    static Gazetteer load_json(const std::filesystem::path& path);
    std::optional<LatLon> lookup(const std::string& name) const;
};

} // namespace dtlink
