// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dtlink/errors.hpp"

#include "json.hpp"

namespace dtlink {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

// Great-circle distance; only used for radius queries over the registry.
double haversine_km(LatLon a, LatLon b) {
    constexpr double deg = 3.14159265358979323846 / 180.0;
    const double dlat = (b.lat_deg - a.lat_deg) * deg;
    const double dlon = (b.lon_deg - a.lon_deg) * deg;
    const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat_deg * deg) * std::cos(b.lat_deg * deg) *
                         std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * (kEarthRadiusM / 1000.0) * std::asin(std::min(1.0, std::sqrt(s)));
}

} // namespace

SensorRegistry SensorRegistry::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open registry file: " + path.string());
    }

    SensorRegistry registry;
    std::string line;
    if (!std::getline(in, line)) {
        throw parse_error("registry file is empty: " + path.string());
    }
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"sensor_id", "type",         "lat",
                                               "lon",       "record_bytes", "records_per_hour"};
    if (header != expected) {
        throw parse_error("registry header must be "
                          "sensor_id,type,lat,lon,record_bytes,records_per_hour");
    }

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != expected.size()) {
            throw parse_error("registry line " + std::to_string(lineno) +
                              ": expected 6 fields, got " + std::to_string(fields.size()));
        }
        SensorRecord rec;
        try {
            rec.sensor_id = fields[0];
            rec.type = fields[1];
            rec.lat_deg = std::stod(fields[2]);
            rec.lon_deg = std::stod(fields[3]);
            rec.record_bytes = static_cast<std::uint64_t>(std::stoull(fields[4]));
            rec.records_per_hour = std::stod(fields[5]);
        } catch (const std::exception&) {
            throw parse_error("registry line " + std::to_string(lineno) + ": bad numeric field");
        }
        if (rec.sensor_id.empty()) {
            throw validation_error("registry.sensor_id",
                                   "empty on line " + std::to_string(lineno));
        }
        if (rec.record_bytes == 0 || rec.records_per_hour <= 0.0) {
            throw validation_error("registry.record_bytes",
                                   "sensor '" + rec.sensor_id +
                                       "' must have positive record size and rate");
        }
        registry.add(std::move(rec));
    }
    return registry;
}

void SensorRegistry::add(SensorRecord record) {
    if (index_.count(record.sensor_id) != 0) {
        throw validation_error("registry.sensor_id",
                               "duplicate sensor id '" + record.sensor_id + "'");
    }
    index_[record.sensor_id] = records_.size();
    records_.push_back(std::move(record));
}

const SensorRecord* SensorRegistry::find(const std::string& sensor_id) const {
    auto it = index_.find(sensor_id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

std::vector<const SensorRecord*> SensorRegistry::by_type(const std::string& type) const {
    std::vector<const SensorRecord*> out;
    for (const auto& rec : records_) {
        if (rec.type == type) {
            out.push_back(&rec);
        }
    }
    return out;
}

std::vector<const SensorRecord*> SensorRegistry::within_radius(LatLon center,
                                                               double radius_km) const {
    std::vector<const SensorRecord*> out;
    for (const auto& rec : records_) {
        if (haversine_km(center, {rec.lat_deg, rec.lon_deg}) <= radius_km) {
            out.push_back(&rec);
        }
    }
    return out;
}

LatLon SensorRegistry::centroid() const {
    if (records_.empty()) {
        return {};
    }
    double lat = 0.0;
    double lon = 0.0;
    for (const auto& rec : records_) {
        lat += rec.lat_deg;
        lon += rec.lon_deg;
    }
    const auto count = static_cast<double>(records_.size());
    return {lat / count, lon / count};
}

Gazetteer Gazetteer::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open gazetteer file: " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("gazetteer file " + path.string() + ": " + e.what());
    }
    Gazetteer gaz;
    for (const auto& [name, value] : doc.items()) {
        gaz.places[name] = {value.at("lat_deg").get<double>(),
                            value.at("lon_deg").get<double>()};
    }
    return gaz;
}

std::optional<LatLon> Gazetteer::lookup(const std::string& name) const {
    // case-insensitive place match
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    for (const auto& [place, pos] : places) {
        std::string lower = place;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (lower == key) {
            return pos;
        }
    }
    return std::nullopt;
}

} // namespace dtlink
