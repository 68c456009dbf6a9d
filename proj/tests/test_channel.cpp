// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "dtlink/channel.hpp"
#include "dtlink/errors.hpp"
#include "dtlink/geometry.hpp"
#include "dtlink/units.hpp"
#include "test_support.hpp"

using namespace dtlink;

TEST_CASE("deterministic gain follows the path-loss law") {
    ChannelParams ch;
    ch.kappa = 1.0;
    ch.alpha = 2.0;
    // kappa=1, alpha=2, d=100: g = 1e-4 with unit fading and shadowing
    const auto link = make_link(ch, 100.0, 1.0, 1.0);
    CHECK(link.gain == doctest::Approx(1e-4).epsilon(1e-12));

    ch.kappa = 3.5;
    const auto scaled = make_link(ch, 100.0, 1.0, 1.0);
    CHECK(scaled.gain == doctest::Approx(3.5e-4).epsilon(1e-12));
}

TEST_CASE("doubling distance scales gain by 2^-alpha exactly") {
    for (const double alpha : {2.0, 2.7, 3.5, 4.0}) {
        ChannelParams ch;
        ch.alpha = alpha;
        const double g1 = make_link(ch, 150.0, 1.0, 1.0).gain;
        const double g2 = make_link(ch, 300.0, 1.0, 1.0).gain;
        const double want = std::pow(2.0, -alpha);
        CHECK(std::abs(g2 / g1 - want) <= 1e-12 * want);
    }
}

TEST_CASE("sinr worked values") {
    CHECK(sinr(1e-4, 0.1, 0.0, 1e-6) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(sinr(1e-4, 0.1, 9e-6, 1e-6) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sinr(1e-4, 0.0, 9e-6, 1e-6) == 0.0);
    CHECK_THROWS_AS(sinr(1e-4, 0.1, 0.0, 0.0), std::domain_error);
}

TEST_CASE("rate worked values") {
    CHECK(rate(1e6, 1.0) == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(rate(180e3, 3.0) == doctest::Approx(360e3).epsilon(1e-12));
    CHECK(rate(1e6, 0.0) == 0.0);
}

TEST_CASE("rate and sinr are monotone") {
    double prev = -1.0;
    for (double s = 0.0; s <= 64.0; s += 0.25) {
        const double r = rate(360e3, s);
        CHECK(r > prev);
        prev = r;
    }
    // sinr rises with power, falls with interference
    CHECK(sinr(1e-4, 0.2, 1e-6, 1e-6) > sinr(1e-4, 0.1, 1e-6, 1e-6));
    CHECK(sinr(1e-4, 0.1, 2e-6, 1e-6) < sinr(1e-4, 0.1, 1e-6, 1e-6));
}

TEST_CASE("fading power has unit mean and unit-scale spread") {
    auto sc = dtlink_test::tiny_scenario(1, 1, 1.0, {1000});
    sc.fading = FadingModel::rayleigh;
    // one device, one RB: each draw_realization consumes one fading draw
    double sum = 0.0;
    double sumsq = 0.0;
    const int count = 100000;
    for (int k = 0; k < count; ++k) {
        const auto r = draw_realization(sc, static_cast<std::uint64_t>(k + 1));
        const double fading = r.gains(0, 0) / (sc.channel.kappa * std::pow(100.0, -2.0));
        sum += fading;
        sumsq += fading * fading;
    }
    const double mean = sum / count;
    const double var = sumsq / count - mean * mean;
    CHECK(std::abs(mean - 1.0) < 0.01);   // exponential(1) mean
    CHECK(std::abs(var - 1.0) < 0.05);    // exponential(1) variance
}

TEST_CASE("shadowing sigma 0 leaves the gain deterministic") {
    auto sc = dtlink_test::tiny_scenario(2, 3, 1.0, {1000, 1000});
    sc.fading = FadingModel::none;
    const auto a = draw_realization(sc, 1);
    const auto b = draw_realization(sc, 99);
    CHECK(a.gains == b.gains); // no random factors left
    CHECK(a.gains(0, 0) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(a.gains(1, 0) == doctest::Approx(0.25e-4).epsilon(1e-12)); // d=200
}

TEST_CASE("log-normal shadowing has the configured dB spread") {
    auto sc = dtlink_test::tiny_scenario(1, 1, 1.0, {1000});
    sc.fading = FadingModel::none;
    sc.channel.shadowing_sigma_db = 6.0;
    double sum = 0.0;
    double sumsq = 0.0;
    const int count = 50000;
    for (int k = 0; k < count; ++k) {
        const auto r = draw_realization(sc, static_cast<std::uint64_t>(k + 1));
        const double zeta = r.gains(0, 0) / 1e-4;
        const double x_db = 10.0 * std::log10(zeta);
        sum += x_db;
        sumsq += x_db * x_db;
    }
    const double mean = sum / count;
    const double sd = std::sqrt(sumsq / count - mean * mean);
    CHECK(std::abs(mean) < 0.1);
    CHECK(std::abs(sd - 6.0) < 0.1);
}

TEST_CASE("same seed reproduces the realization bit for bit") {
    Scenario sc = load_scenario(dtlink_test::data_path("scenario.json"));
    const auto a = draw_realization(sc, 42);
    const auto b = draw_realization(sc, 42);
    CHECK(a.gains == b.gains);
    CHECK(a.interference_w == b.interference_w);

    const auto c = draw_realization(sc, 43);
    CHECK_FALSE(a.gains == c.gains);
}

TEST_CASE("log-uniform interference stays inside its bounds") {
    Scenario sc = load_scenario(dtlink_test::data_path("scenario.json"));
    REQUIRE(sc.interference.kind == InterferenceModel::Kind::log_uniform);
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const auto r = draw_realization(sc, seed);
        for (const double iw : r.interference_w) {
            CHECK(iw >= sc.interference.min_w);
            CHECK(iw <= sc.interference.max_w);
        }
    }
}

TEST_CASE("constant interference model needs no draws") {
    auto sc = dtlink_test::tiny_scenario(1, 4, 1.0, {1000});
    sc.interference.kind = InterferenceModel::Kind::constant;
    sc.interference.constant_w = 7e-9;
    const auto r = draw_realization(sc, 5);
    for (const double iw : r.interference_w) {
        CHECK(iw == 7e-9);
    }
}

TEST_CASE("unit conversions round-trip") {
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(watts_to_dbm(dbm_to_watts(-93.0)) == doctest::Approx(-93.0).epsilon(1e-12));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(linear_to_db(db_to_linear(7.25)) == doctest::Approx(7.25).epsilon(1e-12));
}

TEST_CASE("distance is symmetric and respects the triangle inequality") {
    const Point a{0.0, 0.0};
    const Point b{30.0, 40.0};
    const Point c{-12.0, 7.5};
    CHECK(distance(a, b) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(distance(a, b) == distance(b, a));
    CHECK(distance(a, c) + distance(c, b) >= distance(a, b) - 1e-12);
}

TEST_CASE("channel parameter validation names the offending field") {
    ChannelParams ch;
    ch.kappa = 0.0;
    CHECK_THROWS_AS(ch.validate(), validation_error);
    try {
        ch.validate();
    } catch (const validation_error& e) {
        CHECK(e.field() == "channel.kappa");
    }

    ch.kappa = 1.0;
    ch.alpha = 1.5;
    CHECK_THROWS_AS(ch.validate(), validation_error);
}
