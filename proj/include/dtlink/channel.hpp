// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cstdint>
#include <vector>

#include "dtlink/grid.hpp"

namespace dtlink {

struct Scenario;

/// Physical constants of the uplink channel. Gains compose as
/// g = kappa * d^(-alpha) * fading * shadowing.
struct ChannelParams {
    double kappa = 1.0;              // environment constant
    double alpha = 2.0;              // path-loss exponent
    double shadowing_sigma_db = 0.0; // std-dev of log-normal shadowing, dB
    double noise_power_w = 1e-13;    // AWGN power per RB, watts
    double rb_bandwidth_hz = 360e3;  // per-RB bandwidth (30 kHz x 12 subcarriers)

    /// Throws validation_error naming the violated field.
    void validate() const;
};

/// Small-scale fading draw policy. `none` pins fading power to 1 (used to
/// disable randomness for calibration runs).
enum class FadingModel { rayleigh, none };

/// Exogenous per-RB inter-cell interference power. The interfering cells'
/// geometry is not modeled; their aggregate is sampled from a configured
/// distribution instead.
struct InterferenceModel {
    enum class Kind { constant, log_uniform };

    Kind kind = Kind::constant;
    double constant_w = 0.0;
    double min_w = 0.0; // log_uniform bounds
    double max_w = 0.0;

    void validate() const;
};

/// One transmitter-receiver link at a sampled instant.
struct LinkRealization {
    double distance_m = 0.0;
    double fading_power = 1.0;     // ||h||^2, unit-mean exponential
    double shadowing_linear = 1.0; // zeta, linear scale
    double gain = 0.0;             // composite g
};

/// Composite gain from the channel constants and a pair of draws.
LinkRealization make_link(const ChannelParams& params, double distance_m,
                          double fading_power, double shadowing_linear);

/// Sampled channel state for a whole scenario: per-(device, RB) gains plus
/// per-RB interference powers. Regenerating with the same (scenario, seed)
/// yields bit-identical values on any platform.
struct ChannelRealization {
    Grid<double> gains;                // device x RB
    std::vector<double> interference_w; // per RB
    std::uint64_t seed = 0;
};

/// One independent fading draw per (device, RB); one shadowing draw per
/// device, shared across that device's RBs; interference per RB from the
/// scenario's configured model.
ChannelRealization draw_realization(const Scenario& scenario, std::uint64_t seed);

/// gain * power / (interference + noise). Throws std::domain_error when the
/// denominator is zero.
double sinr(double gain, double power_w, double interference_w, double noise_w);

/// Shannon rate B * log2(1 + sinr), bits/s.
double rate(double bandwidth_hz, double sinr_value);

} // namespace dtlink
