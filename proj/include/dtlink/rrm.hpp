// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dtlink/channel.hpp"
#include "dtlink/grid.hpp"

#include "json.hpp"

namespace dtlink {

struct Scenario;

/// Min-max-delay RB assignment instance at a fixed candidate power vector.
/// Rates and SINRs are per (device, RB).
struct RrmProblem {
    Grid<double> rates_bps;            // N x M
    Grid<double> sinr;                 // N x M
    std::vector<double> data_bits;     // N
    double beta = 1.0;                 // SINR threshold, linear
    std::vector<double> power_w;       // N
    double p_max_w = 0.0;
    std::vector<std::string> device_ids; // optional labels; indices used if empty

    int n() const { return rates_bps.rows(); }
    int m() const { return rates_bps.cols(); }

    /// Throws validation_error on shape mismatch.
    void validate_shapes() const;
};

struct ConstraintViolation {
    enum class Kind { power_bound, sinr_threshold, rb_exclusivity, unserved_device };

    Kind kind;
    std::optional<std::string> device;
    std::optional<int> rb;
    std::string detail;
};

std::string violation_kind_name(ConstraintViolation::Kind kind);

/// RB assignment plus the delays it induces. At most one device per RB
/// (OMA exclusivity); an unserved device has infinite delay and renders the
/// solution infeasible.
struct RrmSolution {
    Grid<std::uint8_t> assignment;          // N x M, 0/1
    std::vector<double> power_w;            // N
    std::vector<double> per_device_delay_s; // N, D_i / sum_j b_ij R_ij
    double max_delay_s = 0.0;
    bool feasible = false;
    std::vector<ConstraintViolation> violations;
    // Per-round violation lists accumulated by reflexion_solve; empty for
    // direct solver calls.
    std::vector<std::vector<ConstraintViolation>> round_history;
};

// Enumeration guard for the exact solver.
inline constexpr int kMaxExactDevices = 6;
inline constexpr int kMaxExactRbs = 12;

/// Rates and SINRs for every (device, RB) pair at the given power vector.
/// Throws validation_error on a power vector of the wrong length or with
/// entries outside [0, p_max].
RrmProblem build_problem(const Scenario& scenario, const ChannelRealization& realization,
                         std::vector<double> power_w);

/// Optimal assignment by exhaustive enumeration (branch-and-bound over all
/// exclusive RB assignments). Pairs below the SINR threshold are ineligible;
/// every device must receive at least one RB. Throws
/// instance_too_large_error beyond the guard.
RrmSolution solve_exact(const RrmProblem& problem);

/// Bisection on the target delay with a greedy feasibility check (devices by
/// descending scarcity, RBs by descending rate) backed by a matching repair
/// pass, then pairwise reassign/swap local search. Infeasibility is a
/// result, not an error.
RrmSolution solve_heuristic(const RrmProblem& problem, double tolerance_s = 1e-4);

/// Every violation of: power bounds, SINR threshold on assigned pairs,
/// binary exclusive RB indicators, and device coverage.
std::vector<ConstraintViolation> check_constraints(const Scenario& scenario,
                                                   const RrmProblem& problem,
                                                   const RrmSolution& solution);

/// Evaluate-violations-then-repair loop: solve with the SINR constraint
/// relaxed, check all constraints, permanently forbid violating (device, RB)
/// pairs, re-solve. Stops when clean or after max_rounds. Power is pinned at
/// p_max (rates are monotone in own power under exogenous interference, so
/// the joint power search collapses).
RrmSolution reflexion_solve(const Scenario& scenario, const ChannelRealization& realization,
                            int max_rounds);

nlohmann::ordered_json solution_to_json(const RrmSolution& solution,
                                        const RrmProblem& problem);

} // namespace dtlink
