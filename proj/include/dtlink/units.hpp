// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cmath>

namespace dtlink {

// Operator-facing files carry powers in dBm and ratios in dB; everything in
// memory is linear (watts, dimensionless).

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double v) { return 10.0 * std::log10(v); }

} // namespace dtlink
