// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/cards.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dtlink/errors.hpp"

#include "json.hpp"

namespace dtlink {

namespace {

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open card file: " + path.string());
    }
    try {
        nlohmann::json doc;
        in >> doc;
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("card file " + path.string() + ": " + e.what());
    }
}

std::vector<SensorCard> parse_sensor_cards(const nlohmann::json& doc) {
    if (!doc.is_array()) {
        throw parse_error("sensor cards: expected a JSON array");
    }
    std::vector<SensorCard> cards;
    for (const auto& item : doc) {
        SensorCard card;
        card.sensor_type = item.at("sensor_type").get<std::string>();
        card.description = item.at("description").get<std::string>();
        card.unit = item.at("unit").get<std::string>();
        cards.push_back(std::move(card));
    }
    return cards;
}

std::vector<DataApiCard> parse_api_cards(const nlohmann::json& doc) {
    if (!doc.is_array()) {
        throw parse_error("api cards: expected a JSON array");
    }
    std::vector<DataApiCard> cards;
    for (const auto& item : doc) {
        DataApiCard card;
        card.name = item.at("name").get<std::string>();
        card.signature = item.at("signature").get<std::string>();
        card.description = item.at("description").get<std::string>();
        if (item.contains("params")) {
            for (const auto& p : item.at("params")) {
                card.params.push_back({p.at("name").get<std::string>(),
                                       p.at("type").get<std::string>()});
            }
        }
        cards.push_back(std::move(card));
    }
    return cards;
}

} // namespace

void CardSet::validate() const {
    std::set<std::string> seen_types;
    for (const auto& card : sensors) {
        if (card.sensor_type.empty()) {
            throw validation_error("cards.sensor_type", "empty sensor type");
        }
        if (card.unit.empty()) {
            throw validation_error("cards.unit",
                                   "sensor '" + card.sensor_type + "' has no unit");
        }
        if (!seen_types.insert(card.sensor_type).second) {
            throw validation_error("cards.sensor_type",
                                   "duplicate sensor type '" + card.sensor_type + "'");
        }
    }
    std::set<std::string> seen_names;
    for (const auto& api : apis) {
        if (api.name.empty()) {
            throw validation_error("cards.api.name", "empty api name");
        }
        if (!seen_names.insert(api.name).second) {
            throw validation_error("cards.api.name",
                                   "duplicate api name '" + api.name + "'");
        }
        for (const auto& p : api.params) {
            if (p.name.empty()) {
                throw validation_error("cards.api.params",
                                       "api '" + api.name + "' has an unnamed parameter");
            }
        }
    }
}

std::string CardSet::render() const {
    std::ostringstream out;
    out << "Available sensor types:\n";
    for (const auto& card : sensors) {
        out << "- " << card.sensor_type << " [" << card.unit << "]: " << card.description
            << "\n";
    }
    out << "Available data APIs:\n";
    for (const auto& api : apis) {
        out << "- " << api.signature << ": " << api.description << "\n";
    }
    return out.str();
}

CardSet load_sensor_cards(const std::filesystem::path& path) {
    CardSet set;
    set.sensors = parse_sensor_cards(load_json_file(path));
    set.validate();
    return set;
}

CardSet load_cards(const std::filesystem::path& sensors_path,
                   const std::filesystem::path& apis_path) {
    CardSet set;
    set.sensors = parse_sensor_cards(load_json_file(sensors_path));
    set.apis = parse_api_cards(load_json_file(apis_path));
    set.validate();
    return set;
}

} // namespace dtlink
