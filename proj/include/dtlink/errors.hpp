// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dtlink {

/// Malformed file or message payload (JSON/CSV that does not parse or is
/// missing required keys).
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A checked invariant does not hold. `field()` names the offending field.
class validation_error : public std::runtime_error {
public:
    validation_error(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Exact solver refused the instance (enumeration guard exceeded).
class instance_too_large_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Transport or protocol failure talking to an external service.
class backend_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Series too short to form the requested buckets.
class insufficient_history_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Context window shorter than a predictor requires.
class insufficient_context_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace dtlink
