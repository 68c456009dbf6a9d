// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dtlink/errors.hpp"
#include "dtlink/scenario.hpp"

#include "httplib.h"
#include "json.hpp"

namespace dtlink {

void TrafficSeries::validate() const {
    if (values.empty()) {
        throw validation_error("traffic.values", "series is empty");
    }
    if (bucket_minutes <= 0) {
        throw validation_error("traffic.bucket_minutes", "must be positive");
    }
    if (units == LoadUnits::fraction) {
        for (const double v : values) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw validation_error("traffic.values",
                                       "fraction series has value outside [0,1]: " +
                                           std::to_string(v));
            }
        }
    }
}

std::vector<double> NaiveLastPredictor::forecast(std::span<const double> context, int steps) {
    if (context.empty()) {
        throw insufficient_context_error("naive-last needs a non-empty context");
    }
    return std::vector<double>(static_cast<std::size_t>(steps), context.back());
}

MovingAveragePredictor::MovingAveragePredictor(int window) : window_(window) {
    if (window < 1) {
        throw validation_error("predictor.window", "must be at least 1");
    }
}

std::vector<double> MovingAveragePredictor::forecast(std::span<const double> context,
                                                     int steps) {
    if (static_cast<int>(context.size()) < window_) {
        throw insufficient_context_error("moving-average window exceeds context length");
    }
    const auto tail = context.subspan(context.size() - static_cast<std::size_t>(window_));
    const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) /
                        static_cast<double>(window_);
    return std::vector<double>(static_cast<std::size_t>(steps), mean);
}

SeasonalNaivePredictor::SeasonalNaivePredictor(int period_buckets) : period_(period_buckets) {
    if (period_buckets < 1) {
        throw validation_error("predictor.period", "must be at least 1");
    }
}

std::vector<double> SeasonalNaivePredictor::forecast(std::span<const double> context,
                                                     int steps) {
    if (static_cast<int>(context.size()) < period_) {
        throw insufficient_context_error("seasonal period exceeds context length");
    }
    std::vector<double> out(static_cast<std::size_t>(steps));
    const std::size_t base = context.size() - static_cast<std::size_t>(period_);
    for (int k = 0; k < steps; ++k) {
        out[static_cast<std::size_t>(k)] =
            context[base + static_cast<std::size_t>(k % period_)];
    }
    return out;
}

SeasonalNaivePredictor make_daily_seasonal(int bucket_minutes) {
    if (bucket_minutes <= 0 || 1440 % bucket_minutes != 0) {
        throw validation_error("predictor.period",
                               "bucket must divide a day for daily seasonality");
    }
    return SeasonalNaivePredictor(1440 / bucket_minutes);
}

RemotePredictor::RemotePredictor(std::string base_url) : base_url_(std::move(base_url)) {}

RemotePredictor RemotePredictor::from_env() {
    const char* url = std::getenv("DTLINK_PREDICTOR_URL");
    if (url == nullptr || *url == '\0') {
        throw backend_error("DTLINK_PREDICTOR_URL is not set");
    }
    return RemotePredictor(url);
}

std::vector<double> RemotePredictor::forecast(std::span<const double> context, int steps) {
    nlohmann::json body;
    body["values"] = std::vector<double>(context.begin(), context.end());
    body["steps"] = steps;

    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    auto res = client.Post("/forecast", body.dump(), "application/json");
    if (!res) {
        throw backend_error("predictor endpoint unreachable: " + base_url_);
    }
    if (res->status != 200) {
        throw backend_error("predictor endpoint returned status " +
                            std::to_string(res->status));
    }
    try {
        auto doc = nlohmann::json::parse(res->body);
        auto out = doc.at("forecast").get<std::vector<double>>();
        if (static_cast<int>(out.size()) != steps) {
            throw backend_error("predictor returned " + std::to_string(out.size()) +
                                " points, wanted " + std::to_string(steps));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw backend_error(std::string("malformed predictor response: ") + e.what());
    }
}

namespace {

// Buckets people actually use: divisors of an hour, then whole hours.
bool divisor_friendly(int minutes) {
    if (minutes <= 60) {
        return 60 % minutes == 0;
    }
    return minutes % 60 == 0;
}

} // namespace

TrafficSeries rescale(const TrafficSeries& series, int horizon_minutes) {
    series.validate();
    if (horizon_minutes <= 0) {
        throw validation_error("horizon_minutes", "must be positive");
    }

    const int needed = (horizon_minutes + kMaxForecast - 1) / kMaxForecast;
    int bucket = std::max(needed, series.bucket_minutes);
    while (!(divisor_friendly(bucket) && bucket % series.bucket_minutes == 0)) {
        ++bucket;
    }

    const int factor = bucket / series.bucket_minutes;
    const std::size_t keep = (series.values.size() / static_cast<std::size_t>(factor)) *
                             static_cast<std::size_t>(factor);
    if (keep / static_cast<std::size_t>(factor) < kContextLen) {
        throw insufficient_history_error(
            "need " + std::to_string(kContextLen) + " buckets of " + std::to_string(bucket) +
            " min, have " + std::to_string(keep / static_cast<std::size_t>(factor)));
    }
    const std::size_t drop = series.values.size() - keep; // oldest samples go

    TrafficSeries out;
    out.bucket_minutes = bucket;
    out.units = series.units;
    out.start_time_s =
        series.start_time_s + static_cast<std::int64_t>(drop) * 60 * series.bucket_minutes;
    out.values.reserve(keep / static_cast<std::size_t>(factor));
    for (std::size_t i = drop; i < series.values.size(); i += static_cast<std::size_t>(factor)) {
        double sum = 0.0;
        for (int j = 0; j < factor; ++j) {
            sum += series.values[i + static_cast<std::size_t>(j)];
        }
        out.values.push_back(sum / factor);
    }
    return out;
}

int forecast_steps(int horizon_minutes, int bucket_minutes) {
    if (horizon_minutes <= 0 || bucket_minutes <= 0) {
        throw validation_error("horizon_minutes", "must be positive");
    }
    return (horizon_minutes + bucket_minutes - 1) / bucket_minutes;
}

TrafficSeries predict(Predictor& predictor, const TrafficSeries& context, int steps) {
    context.validate();
    if (static_cast<int>(context.values.size()) < kContextLen) {
        throw insufficient_context_error("context has " +
                                         std::to_string(context.values.size()) +
                                         " buckets, need " + std::to_string(kContextLen));
    }
    if (steps < 1 || steps > kMaxForecast) {
        throw validation_error("steps", "must be within 1.." + std::to_string(kMaxForecast));
    }
    const std::span<const double> window(
        context.values.data() + context.values.size() - kContextLen,
        static_cast<std::size_t>(kContextLen));

    TrafficSeries out;
    out.values = predictor.forecast(window, steps);
    out.bucket_minutes = context.bucket_minutes;
    out.units = context.units;
    out.start_time_s = context.end_time_s();
    if (static_cast<int>(out.values.size()) != steps) {
        throw backend_error("predictor '" + predictor.name() + "' returned " +
                            std::to_string(out.values.size()) + " points, wanted " +
                            std::to_string(steps));
    }
    return out;
}

double nrmse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size()) {
        throw validation_error("nrmse", "length mismatch: " + std::to_string(predicted.size()) +
                                            " vs " + std::to_string(actual.size()));
    }
    if (actual.empty()) {
        throw validation_error("nrmse", "empty series");
    }
    const double mean = std::accumulate(actual.begin(), actual.end(), 0.0) /
                        static_cast<double>(actual.size());
    if (mean == 0.0) {
        throw validation_error("nrmse", "actual series has zero mean");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double diff = predicted[i] - actual[i];
        sq += diff * diff;
    }
    return std::sqrt(sq / static_cast<double>(actual.size())) / mean;
}

double nrmse(const TrafficSeries& predicted, const TrafficSeries& actual) {
    if (predicted.bucket_minutes != actual.bucket_minutes) {
        throw validation_error("nrmse", "bucket mismatch: " +
                                            std::to_string(predicted.bucket_minutes) +
                                            " vs " + std::to_string(actual.bucket_minutes) +
                                            " minutes");
    }
    return nrmse(std::span<const double>(predicted.values),
                 std::span<const double>(actual.values));
}

const char* route_name(Route route) {
    return route == Route::cellular_6g ? "cellular-6g" : "zigbee-fallback";
}

Route gate(const TrafficSeries& forecast, double tau) {
    if (tau < 0.0 || tau > 1.0) {
        throw validation_error("tau", "must lie in [0, 1], got " + std::to_string(tau));
    }
    forecast.validate();
    if (forecast.units != LoadUnits::fraction) {
        throw validation_error("traffic.units",
                               "gate needs a fraction-of-capacity series; convert raw "
                               "volumes with to_fraction first");
    }
    const double peak = *std::max_element(forecast.values.begin(), forecast.values.end());
    return peak < tau ? Route::cellular_6g : Route::zigbee_fallback;
}

double zigbee_delay(std::uint64_t data_bits, const ZigbeeParams& zp) {
    zp.validate();
    if (data_bits == 0) {
        throw validation_error("data_bits", "must be positive");
    }
    return static_cast<double>(data_bits) / zp.rate_bps +
           static_cast<double>(zp.hops) * zp.per_hop_latency_s;
}

double zigbee_delay(const IoTDevice& device, const ZigbeeParams& zp) {
    return zigbee_delay(device.data_bits, zp);
}

namespace {

std::string trim_ws(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::map<std::string, TrafficSeries> load_traffic_csv(const std::filesystem::path& path,
                                                      LoadUnits units) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open traffic file: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || trim_ws(line) != "cell_id,timestamp,load") {
        throw parse_error("traffic header must be cell_id,timestamp,load");
    }

    std::map<std::string, TrafficSeries> by_cell;
    std::map<std::string, std::int64_t> last_ts;
    std::map<std::string, std::int64_t> spacing;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim_ws(line).empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell, ts_text, load_text;
        if (!std::getline(ss, cell, ',') || !std::getline(ss, ts_text, ',') ||
            !std::getline(ss, load_text)) {
            throw parse_error("traffic line " + std::to_string(lineno) + ": expected 3 fields");
        }
        cell = trim_ws(cell);
        std::int64_t ts = 0;
        double load = 0.0;
        try {
            ts = std::stoll(trim_ws(ts_text));
            load = std::stod(trim_ws(load_text));
        } catch (const std::exception&) {
            throw parse_error("traffic line " + std::to_string(lineno) + ": bad numeric field");
        }

        auto& series = by_cell[cell];
        if (series.values.empty()) {
            series.start_time_s = ts;
            series.units = units;
        } else {
            const std::int64_t gap = ts - last_ts[cell];
            if (gap <= 0 || gap % 60 != 0) {
                throw parse_error("traffic line " + std::to_string(lineno) +
                                  ": timestamps must ascend in whole minutes");
            }
            auto it = spacing.find(cell);
            if (it == spacing.end()) {
                spacing[cell] = gap;
                series.bucket_minutes = static_cast<int>(gap / 60);
            } else if (it->second != gap) {
                throw parse_error("traffic line " + std::to_string(lineno) +
                                  ": uneven sampling for cell '" + cell + "'");
            }
        }
        last_ts[cell] = ts;
        series.values.push_back(load);
    }
    for (auto& [cell, series] : by_cell) {
        series.validate();
    }
    return by_cell;
}

TrafficSeries to_fraction(const TrafficSeries& series, double capacity) {
    if (!(capacity > 0.0)) {
        throw validation_error("capacity", "must be positive");
    }
    TrafficSeries out = series;
    out.units = LoadUnits::fraction;
    for (auto& v : out.values) {
        v = std::clamp(v / capacity, 0.0, 1.0);
    }
    return out;
}

} // namespace dtlink
