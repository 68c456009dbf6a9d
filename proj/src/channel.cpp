// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dtlink/scenario.hpp"

namespace dtlink {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

// 53-bit uniform in [0, 1). Derived from the standardized mt19937_64 output
// stream, so realizations are bit-identical across platforms.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Unit-mean exponential via inverse CDF; 1 - u never underflows to 0.
double draw_fading_power(std::mt19937_64& rng) {
    return -std::log1p(-canonical(rng));
}

// zeta = 10^(X/10), X ~ Normal(0, sigma_db^2), Box-Muller.
double draw_shadowing_linear(std::mt19937_64& rng, double sigma_db) {
    if (sigma_db == 0.0) {
        return 1.0;
    }
    const double u1 = canonical(rng);
    const double u2 = canonical(rng);
    const double x = sigma_db * std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(kTwoPi * u2);
    return std::pow(10.0, x / 10.0);
}

double draw_interference(std::mt19937_64& rng, const InterferenceModel& model) {
    switch (model.kind) {
    case InterferenceModel::Kind::constant:
        return model.constant_w;
    case InterferenceModel::Kind::log_uniform: {
        const double lo = std::log(model.min_w);
        const double hi = std::log(model.max_w);
        return std::exp(lo + canonical(rng) * (hi - lo));
    }
    }
    return 0.0;
}

} // namespace

LinkRealization make_link(const ChannelParams& params, double distance_m,
                          double fading_power, double shadowing_linear) {
    LinkRealization link;
    link.distance_m = distance_m;
    link.fading_power = fading_power;
    link.shadowing_linear = shadowing_linear;
    link.gain = params.kappa * std::pow(distance_m, -params.alpha) * fading_power *
                shadowing_linear;
    return link;
}

ChannelRealization draw_realization(const Scenario& scenario, std::uint64_t seed) {
    std::mt19937_64 rng(seed);

    const int n = static_cast<int>(scenario.devices.size());
    const int m = scenario.num_rbs;

    ChannelRealization out;
    out.seed = seed;
    out.gains = Grid<double>(n, m);
    out.interference_w.resize(static_cast<std::size_t>(m));

    for (int i = 0; i < n; ++i) {
        const double d = distance(scenario.devices[i].position, scenario.bs_position);
        const double zeta =
            draw_shadowing_linear(rng, scenario.channel.shadowing_sigma_db);
        for (int j = 0; j < m; ++j) {
            const double fading = scenario.fading == FadingModel::rayleigh
                                      ? draw_fading_power(rng)
                                      : 1.0;
            out.gains(i, j) = make_link(scenario.channel, d, fading, zeta).gain;
        }
    }
    for (int j = 0; j < m; ++j) {
        out.interference_w[static_cast<std::size_t>(j)] =
            draw_interference(rng, scenario.interference);
    }
    return out;
}

double sinr(double gain, double power_w, double interference_w, double noise_w) {
    const double denom = interference_w + noise_w;
    if (denom == 0.0) {
        throw std::domain_error("sinr: interference + noise must be > 0");
    }
    return gain * power_w / denom;
}

double rate(double bandwidth_hz, double sinr_value) {
    return bandwidth_hz * std::log2(1.0 + sinr_value);
}

} // namespace dtlink
