// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// Traffic-load series, patch rescaling, forecast baselines and the tau gate.
// Predictors see a fixed 32-sample context and emit at most 128 points, so
// longer horizons are reached by coarsening the bucket size, not the window.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dtlink {

enum class LoadUnits : std::uint8_t { fraction, raw };

struct TrafficSeries {
    std::vector<double> values;
    int bucket_minutes = 1;
    std::int64_t start_time_s = 0;
    LoadUnits units = LoadUnits::fraction;

    void validate() const; // throws validation_error
    std::int64_t end_time_s() const {
        return start_time_s +
               static_cast<std::int64_t>(values.size()) * 60 * bucket_minutes;
    }
};

inline constexpr int kContextLen = 32;
inline constexpr int kMaxForecast = 128;

class Predictor {
  public:
    virtual ~Predictor() = default;
    // context has exactly kContextLen samples; 1 <= steps <= kMaxForecast
    virtual std::vector<double> forecast(std::span<const double> context, int steps) = 0;
    virtual std::string name() const = 0;
};

// repeats the final context value
class NaiveLastPredictor : public Predictor {
  public:
    std::vector<double> forecast(std::span<const double> context, int steps) override;
    std::string name() const override { return "naive-last"; }
};

// constant forecast at the mean of the last k context samples
class MovingAveragePredictor : public Predictor {
  public:
    explicit MovingAveragePredictor(int window = 8);
    std::vector<double> forecast(std::span<const double> context, int steps) override;
    std::string name() const override { return "moving-average"; }

  private:
    int window_;
};

// copies the value one period back; period must fit in the context
class SeasonalNaivePredictor : public Predictor {
  public:
    explicit SeasonalNaivePredictor(int period_buckets);
    std::vector<double> forecast(std::span<const double> context, int steps) override;
    std::string name() const override { return "seasonal-naive"; }

  private:
    int period_;
};

// one day worth of buckets, the conventional period for daily load cycles
SeasonalNaivePredictor make_daily_seasonal(int bucket_minutes);

// POSTs {"values": [...], "steps": n} to <base_url>/forecast and expects
// {"forecast": [...]} back. Plug-in point for external forecast models.
class RemotePredictor : public Predictor {
  public:
    explicit RemotePredictor(std::string base_url);
    static RemotePredictor from_env(); // DTLINK_PREDICTOR_URL

    std::vector<double> forecast(std::span<const double> context, int steps) override;
    std::string name() const override { return "remote"; }

  private:
    std::string base_url_;
};

// Coarsens the series so `horizon_minutes` fits in kMaxForecast output
// points. Picks the smallest divisor-friendly bucket (divisors of 60, then
// whole hours) that is a multiple of the input bucket and >=
// ceil(horizon/128); aggregates by mean, dropping the oldest remainder
// samples. Throws insufficient_history_error when fewer than kContextLen
// buckets survive.
TrafficSeries rescale(const TrafficSeries& series, int horizon_minutes);

// number of forecast buckets covering the horizon at the given resolution
int forecast_steps(int horizon_minutes, int bucket_minutes);

// runs the predictor on the last kContextLen buckets of context
TrafficSeries predict(Predictor& predictor, const TrafficSeries& context, int steps);

// (1/mean(actual)) * sqrt(mean((predicted-actual)^2))
double nrmse(const TrafficSeries& predicted, const TrafficSeries& actual);
double nrmse(std::span<const double> predicted, std::span<const double> actual);

enum class Route : std::uint8_t { cellular_6g, zigbee_fallback };

const char* route_name(Route route);

// Cellular6G iff the forecast peak stays strictly below tau.
Route gate(const TrafficSeries& forecast, double tau);

struct ZigbeeParams; // scenario.hpp
struct IoTDevice;

double zigbee_delay(std::uint64_t data_bits, const ZigbeeParams& zp);
double zigbee_delay(const IoTDevice& device, const ZigbeeParams& zp);

// CSV columns: cell_id,timestamp,load. Rows must be grouped by cell with
// uniformly spaced, ascending timestamps.
std::map<std::string, TrafficSeries> load_traffic_csv(const std::filesystem::path& path,
                                                      LoadUnits units = LoadUnits::fraction);

// divides by capacity and clamps into [0,1]
TrafficSeries to_fraction(const TrafficSeries& series, double capacity);

} // namespace dtlink
