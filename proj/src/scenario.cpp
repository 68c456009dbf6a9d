// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dtlink/errors.hpp"
#include "dtlink/units.hpp"

namespace dtlink {

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        throw parse_error(std::string("missing required key '") + key + "'");
    }
    return *it;
}

} // namespace

void ChannelParams::validate() const {
    if (!(kappa > 0.0)) {
        throw validation_error("channel.kappa", "must be > 0");
    }
    if (!(alpha >= 2.0)) {
        throw validation_error("channel.alpha", "must be >= 2");
    }
    if (!(shadowing_sigma_db >= 0.0)) {
        throw validation_error("channel.shadowing_sigma_db", "must be >= 0");
    }
    if (!(noise_power_w > 0.0)) {
        throw validation_error("channel.noise_power_w", "must be > 0");
    }
    if (!(rb_bandwidth_hz > 0.0)) {
        throw validation_error("channel.rb_bandwidth_hz", "must be > 0");
    }
}

void InterferenceModel::validate() const {
    switch (kind) {
    case Kind::constant:
        if (!(constant_w >= 0.0)) {
            throw validation_error("channel.interference.power", "must be >= 0");
        }
        break;
    case Kind::log_uniform:
        if (!(min_w > 0.0) || !(max_w >= min_w)) {
            throw validation_error("channel.interference.range",
                                   "log_uniform needs 0 < min <= max");
        }
        break;
    }
}

void ZigbeeParams::validate() const {
    if (!(rate_bps > 0.0)) {
        throw validation_error("zigbee.rate_bps", "must be > 0");
    }
    if (!(per_hop_latency_s >= 0.0)) {
        throw validation_error("zigbee.per_hop_latency_s", "must be >= 0");
    }
    if (hops < 1) {
        throw validation_error("zigbee.hops", "must be >= 1");
    }
}

void Scenario::validate() const {
    if (num_rbs < 1) {
        throw validation_error("rbs.count", "must be >= 1");
    }
    if (cc_ue_count < 0) {
        throw validation_error("cc_ues", "must be >= 0");
    }
    if (!(p_max_w > 0.0)) {
        throw validation_error("limits.p_max_dbm", "implied p_max must be > 0 W");
    }
    if (!(beta > 0.0)) {
        throw validation_error("limits.beta_db", "implied beta must be > 0");
    }
    if (!(tau >= 0.0 && tau <= 1.0)) {
        std::ostringstream msg;
        msg << "must be within [0, 1], got " << tau;
        throw validation_error("tau", msg.str());
    }
    channel.validate();
    interference.validate();
    zigbee.validate();

    std::set<std::string> seen;
    for (const auto& dev : devices) {
        if (dev.id.empty()) {
            throw validation_error("devices.id", "must be non-empty");
        }
        if (!seen.insert(dev.id).second) {
            throw validation_error("devices.id", "duplicate device id '" + dev.id + "'");
        }
        if (dev.data_bits == 0) {
            throw validation_error("devices.data_bits",
                                   "must be > 0 (device '" + dev.id + "')");
        }
        if (dev.position == bs_position) {
            throw validation_error("devices.position",
                                   "device '" + dev.id + "' coincides with the BS");
        }
    }
}

Scenario scenario_from_json(const nlohmann::json& doc) {
    Scenario s;
    try {
        const auto& bs = require(doc, "bs");
        s.bs_position = {require(bs, "x_m").get<double>(), require(bs, "y_m").get<double>()};

        s.cc_ue_count = doc.value("cc_ues", 0);

        for (const auto& d : require(doc, "devices")) {
            IoTDevice dev;
            dev.id = require(d, "id").get<std::string>();
            dev.position = {require(d, "x_m").get<double>(), require(d, "y_m").get<double>()};
            dev.data_bits = require(d, "data_bits").get<std::uint64_t>();
            dev.sensor_type = d.value("sensor_type", "");
            s.devices.push_back(std::move(dev));
        }

        s.num_rbs = require(require(doc, "rbs"), "count").get<int>();

        const auto& ch = require(doc, "channel");
        s.channel.kappa = require(ch, "kappa").get<double>();
        s.channel.alpha = require(ch, "alpha").get<double>();
        s.channel.shadowing_sigma_db = require(ch, "shadowing_sigma_db").get<double>();
        s.channel.noise_power_w = dbm_to_watts(require(ch, "noise_dbm").get<double>());
        s.channel.rb_bandwidth_hz = require(ch, "rb_bandwidth_hz").get<double>();

        const std::string fading = ch.value("fading", "rayleigh");
        if (fading == "rayleigh") {
            s.fading = FadingModel::rayleigh;
        } else if (fading == "none") {
            s.fading = FadingModel::none;
        } else {
            throw validation_error("channel.fading", "unknown model '" + fading + "'");
        }

        if (ch.contains("interference")) {
            const auto& in = ch.at("interference");
            const std::string model = require(in, "model").get<std::string>();
            if (model == "constant") {
                s.interference.kind = InterferenceModel::Kind::constant;
                s.interference.constant_w = dbm_to_watts(require(in, "power_dbm").get<double>());
            } else if (model == "log_uniform") {
                s.interference.kind = InterferenceModel::Kind::log_uniform;
                s.interference.min_w = dbm_to_watts(require(in, "min_dbm").get<double>());
                s.interference.max_w = dbm_to_watts(require(in, "max_dbm").get<double>());
            } else {
                throw validation_error("channel.interference.model",
                                       "unknown model '" + model + "'");
            }
        } else {
            s.interference.kind = InterferenceModel::Kind::constant;
            s.interference.constant_w = 0.0;
        }

        const auto& limits = require(doc, "limits");
        s.p_max_w = dbm_to_watts(require(limits, "p_max_dbm").get<double>());
        s.beta = db_to_linear(require(limits, "beta_db").get<double>());
        s.tau = require(limits, "tau").get<double>();

        const auto& zb = require(doc, "zigbee");
        s.zigbee.rate_bps = require(zb, "rate_bps").get<double>();
        s.zigbee.per_hop_latency_s = require(zb, "per_hop_latency_s").get<double>();
        s.zigbee.hops = require(zb, "hops").get<int>();

        if (doc.contains("origin")) {
            const auto& o = doc.at("origin");
            s.geo_origin = LatLon{require(o, "lat_deg").get<double>(),
                                  require(o, "lon_deg").get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("scenario config: ") + e.what());
    }

    s.validate();
    return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json doc;
    doc["bs"] = {{"x_m", s.bs_position.x_m}, {"y_m", s.bs_position.y_m}};
    doc["cc_ues"] = s.cc_ue_count;

    auto devices = nlohmann::ordered_json::array();
    for (const auto& d : s.devices) {
        devices.push_back({{"id", d.id},
                           {"x_m", d.position.x_m},
                           {"y_m", d.position.y_m},
                           {"data_bits", d.data_bits},
                           {"sensor_type", d.sensor_type}});
    }
    doc["devices"] = std::move(devices);

    doc["rbs"] = {{"count", s.num_rbs}};

    nlohmann::ordered_json ch;
    ch["kappa"] = s.channel.kappa;
    ch["alpha"] = s.channel.alpha;
    ch["shadowing_sigma_db"] = s.channel.shadowing_sigma_db;
    ch["noise_dbm"] = watts_to_dbm(s.channel.noise_power_w);
    ch["rb_bandwidth_hz"] = s.channel.rb_bandwidth_hz;
    ch["fading"] = s.fading == FadingModel::rayleigh ? "rayleigh" : "none";
    if (s.interference.kind == InterferenceModel::Kind::constant) {
        if (s.interference.constant_w > 0.0) {
            ch["interference"] = {{"model", "constant"},
                                  {"power_dbm", watts_to_dbm(s.interference.constant_w)}};
        }
        // zero interference is the loader default; omit the section
    } else {
        ch["interference"] = {{"model", "log_uniform"},
                              {"min_dbm", watts_to_dbm(s.interference.min_w)},
                              {"max_dbm", watts_to_dbm(s.interference.max_w)}};
    }
    doc["channel"] = std::move(ch);

    doc["limits"] = {{"p_max_dbm", watts_to_dbm(s.p_max_w)},
                     {"beta_db", linear_to_db(s.beta)},
                     {"tau", s.tau}};
    doc["zigbee"] = {{"rate_bps", s.zigbee.rate_bps},
                     {"per_hop_latency_s", s.zigbee.per_hop_latency_s},
                     {"hops", s.zigbee.hops}};
    if (s.geo_origin) {
        doc["origin"] = {{"lat_deg", s.geo_origin->lat_deg},
                         {"lon_deg", s.geo_origin->lon_deg}};
    }
    return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open scenario file: " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("scenario file " + path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw parse_error("cannot write scenario file: " + path.string());
    }
    out << scenario_to_json(s).dump(2) << '\n';
}

} // namespace dtlink
