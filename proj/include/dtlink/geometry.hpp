// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cmath>

namespace dtlink {

/// Planar position on the local tangent plane, meters.
struct Point {
    double x_m = 0.0;
    double y_m = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Geographic position, degrees.
struct LatLon {
    double lat_deg = 0.0;
    double lon_deg = 0.0;

    friend bool operator==(const LatLon&, const LatLon&) = default;
};

/// Euclidean distance on the local plane.
inline double distance(Point a, Point b) {
    return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m);
}

inline constexpr double kEarthRadiusM = 6371000.0;

/// Equirectangular projection about `origin`. Sub-percent distance error at
/// city scale; trivially invertible.
inline Point project_equirectangular(LatLon p, LatLon origin) {
    constexpr double deg = 3.14159265358979323846 / 180.0;
    const double x = kEarthRadiusM * (p.lon_deg - origin.lon_deg) * deg *
                     std::cos(origin.lat_deg * deg);
    const double y = kEarthRadiusM * (p.lat_deg - origin.lat_deg) * deg;
    return {x, y};
}

} // namespace dtlink
