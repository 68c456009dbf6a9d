// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/rrm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "dtlink/errors.hpp"
#include "dtlink/scenario.hpp"

namespace dtlink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string device_label(const RrmProblem& p, int i) {
    if (i >= 0 && i < static_cast<int>(p.device_ids.size())) {
        return p.device_ids[static_cast<std::size_t>(i)];
    }
    return std::to_string(i);
}

// Eligibility under the full contract: the SINR threshold must hold.
Grid<std::uint8_t> beta_eligibility(const RrmProblem& p) {
    Grid<std::uint8_t> ok(p.n(), p.m(), 0);
    for (int i = 0; i < p.n(); ++i) {
        for (int j = 0; j < p.m(); ++j) {
            ok(i, j) = p.sinr(i, j) >= p.beta ? 1 : 0;
        }
    }
    return ok;
}

// Relaxed eligibility used inside the reflexion loop: any pair with positive
// rate that has not been forbidden yet.
Grid<std::uint8_t> relaxed_eligibility(const RrmProblem& p,
                                       const Grid<std::uint8_t>& forbidden) {
    Grid<std::uint8_t> ok(p.n(), p.m(), 0);
    for (int i = 0; i < p.n(); ++i) {
        for (int j = 0; j < p.m(); ++j) {
            ok(i, j) = (p.rates_bps(i, j) > 0.0 && forbidden(i, j) == 0) ? 1 : 0;
        }
    }
    return ok;
}

// Per-device eligible RB indices, rate-descending (ties: lower RB index).
std::vector<std::vector<int>> eligible_by_rate(const RrmProblem& p,
                                               const Grid<std::uint8_t>& elig) {
    std::vector<std::vector<int>> lists(static_cast<std::size_t>(p.n()));
    for (int i = 0; i < p.n(); ++i) {
        auto& list = lists[static_cast<std::size_t>(i)];
        for (int j = 0; j < p.m(); ++j) {
            if (elig(i, j)) {
                list.push_back(j);
            }
        }
        std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
            return p.rates_bps(i, a) > p.rates_bps(i, b);
        });
    }
    return lists;
}

// Kuhn's augmenting-path matching, devices in index order, RB preference as
// listed. Returns rb index per device, -1 if unmatched.
std::vector<int> match_devices(int n, int m, const std::vector<std::vector<int>>& pref) {
    std::vector<int> rb_owner(static_cast<std::size_t>(m), -1);
    std::vector<int> device_rb(static_cast<std::size_t>(n), -1);
    std::vector<char> visited;

    std::function<bool(int)> augment = [&](int dev) -> bool {
        for (int j : pref[static_cast<std::size_t>(dev)]) {
            if (visited[static_cast<std::size_t>(j)]) {
                continue;
            }
            visited[static_cast<std::size_t>(j)] = 1;
            const int holder = rb_owner[static_cast<std::size_t>(j)];
            if (holder == -1 || augment(holder)) {
                rb_owner[static_cast<std::size_t>(j)] = dev;
                device_rb[static_cast<std::size_t>(dev)] = j;
                return true;
            }
        }
        return false;
    };

    for (int i = 0; i < n; ++i) {
        visited.assign(static_cast<std::size_t>(m), 0);
        augment(i);
    }
    return device_rb;
}

std::vector<double> delays_for(const RrmProblem& p, const Grid<std::uint8_t>& assignment) {
    std::vector<double> delays(static_cast<std::size_t>(p.n()), kInf);
    for (int i = 0; i < p.n(); ++i) {
        double total = 0.0;
        for (int j = 0; j < p.m(); ++j) {
            if (assignment(i, j)) {
                total += p.rates_bps(i, j);
            }
        }
        if (total > 0.0) {
            delays[static_cast<std::size_t>(i)] = p.data_bits[static_cast<std::size_t>(i)] / total;
        }
    }
    return delays;
}

RrmSolution assemble(const RrmProblem& p, const Grid<std::uint8_t>& assignment) {
    RrmSolution sol;
    sol.assignment = assignment;
    sol.power_w = p.power_w;
    sol.per_device_delay_s = delays_for(p, assignment);
    sol.max_delay_s = sol.per_device_delay_s.empty()
                          ? 0.0
                          : *std::max_element(sol.per_device_delay_s.begin(),
                                              sol.per_device_delay_s.end());
    sol.feasible = std::all_of(sol.per_device_delay_s.begin(), sol.per_device_delay_s.end(),
                               [](double d) { return std::isfinite(d); });
    return sol;
}

RrmSolution infeasible_solution(const RrmProblem& p, const std::vector<int>& unserved,
                                const Grid<std::uint8_t>& elig) {
    RrmSolution sol = assemble(p, Grid<std::uint8_t>(p.n(), p.m(), 0));
    sol.feasible = false;
    for (int i : unserved) {
        bool any_eligible = false;
        for (int j = 0; j < p.m(); ++j) {
            if (elig(i, j)) {
                any_eligible = true;
                break;
            }
        }
        ConstraintViolation v;
        v.kind = ConstraintViolation::Kind::unserved_device;
        v.device = device_label(p, i);
        v.detail = any_eligible
                       ? "not enough exclusive RBs to serve every device"
                       : "no RB meets the SINR threshold for this device";
        sol.violations.push_back(std::move(v));
    }
    return sol;
}

// Devices a perfect matching cannot cover, in index order.
std::vector<int> uncovered_devices(const RrmProblem& p,
                                   const std::vector<std::vector<int>>& pref) {
    const auto device_rb = match_devices(p.n(), p.m(), pref);
    std::vector<int> unserved;
    for (int i = 0; i < p.n(); ++i) {
        if (device_rb[static_cast<std::size_t>(i)] == -1) {
            unserved.push_back(i);
        }
    }
    return unserved;
}

// ---------------------------------------------------------------------------
// Exact solver: depth-first enumeration over RB choices with an optimistic
// delay bound. Each RB goes to device 0..N-1 (eligible) or stays unassigned;
// the first strictly-better incumbent is kept, so ties resolve toward low
// device and RB indices.
// ---------------------------------------------------------------------------

class ExactEnumerator {
public:
    ExactEnumerator(const RrmProblem& p, const Grid<std::uint8_t>& elig)
        : p_(p), elig_(elig), n_(p.n()), m_(p.m()),
          rate_acc_(static_cast<std::size_t>(n_), 0.0),
          assign_(static_cast<std::size_t>(m_), -1),
          best_assign_(static_cast<std::size_t>(m_), -1) {
        // suffix_[k][i]: total eligible rate device i could still gain from
        // RBs k..M-1.
        suffix_.assign(static_cast<std::size_t>(m_) + 1,
                       std::vector<double>(static_cast<std::size_t>(n_), 0.0));
        for (int k = m_ - 1; k >= 0; --k) {
            for (int i = 0; i < n_; ++i) {
                suffix_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                    suffix_[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(i)] +
                    (elig_(i, k) ? p_.rates_bps(i, k) : 0.0);
            }
        }
    }

    bool run() {
        dfs(0);
        return std::isfinite(best_obj_);
    }

    double best_objective() const { return best_obj_; }

    Grid<std::uint8_t> best_assignment() const {
        Grid<std::uint8_t> a(n_, m_, 0);
        for (int j = 0; j < m_; ++j) {
            if (best_assign_[static_cast<std::size_t>(j)] >= 0) {
                a(best_assign_[static_cast<std::size_t>(j)], j) = 1;
            }
        }
        return a;
    }

private:
    void dfs(int k) {
        if (k == m_) {
            double obj = 0.0;
            for (int i = 0; i < n_; ++i) {
                const double r = rate_acc_[static_cast<std::size_t>(i)];
                if (r <= 0.0) {
                    return; // unserved device
                }
                obj = std::max(obj, p_.data_bits[static_cast<std::size_t>(i)] / r);
            }
            if (obj < best_obj_) {
                best_obj_ = obj;
                best_assign_ = assign_;
            }
            return;
        }
        // Optimistic bound: every remaining eligible RB granted to each device.
        double bound = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double cap = rate_acc_[static_cast<std::size_t>(i)] +
                               suffix_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
            if (cap <= 0.0) {
                return; // device unservable in this subtree
            }
            bound = std::max(bound, p_.data_bits[static_cast<std::size_t>(i)] / cap);
        }
        if (bound >= best_obj_) {
            return;
        }
        for (int dev = 0; dev < n_; ++dev) {
            if (!elig_(dev, k)) {
                continue;
            }
            assign_[static_cast<std::size_t>(k)] = dev;
            rate_acc_[static_cast<std::size_t>(dev)] += p_.rates_bps(dev, k);
            dfs(k + 1);
            rate_acc_[static_cast<std::size_t>(dev)] -= p_.rates_bps(dev, k);
        }
        assign_[static_cast<std::size_t>(k)] = -1;
        dfs(k + 1); // leave RB k unassigned
    }

    const RrmProblem& p_;
    const Grid<std::uint8_t>& elig_;
    int n_;
    int m_;
    std::vector<double> rate_acc_;
    std::vector<int> assign_;
    std::vector<int> best_assign_;
    std::vector<std::vector<double>> suffix_;
    double best_obj_ = kInf;
};

RrmSolution solve_exact_impl(const RrmProblem& p, const Grid<std::uint8_t>& elig) {
    if (p.n() == 0) {
        return assemble(p, Grid<std::uint8_t>(0, p.m(), 0));
    }
    const auto pref = eligible_by_rate(p, elig);
    const auto unserved = uncovered_devices(p, pref);
    if (!unserved.empty()) {
        return infeasible_solution(p, unserved, elig);
    }
    ExactEnumerator enumerator(p, elig);
    enumerator.run(); // matching exists, so a feasible leaf exists
    return assemble(p, enumerator.best_assignment());
}

// ---------------------------------------------------------------------------
// Heuristic solver
// ---------------------------------------------------------------------------

struct HeuristicWorkspace {
    const RrmProblem& p;
    const Grid<std::uint8_t>& elig;
    std::vector<std::vector<int>> pref;   // eligible RBs by descending rate
    std::vector<int> scarcity_order;      // devices by descending D/best_rate
    std::vector<double> need;             // scratch

    HeuristicWorkspace(const RrmProblem& problem, const Grid<std::uint8_t>& eligibility)
        : p(problem), elig(eligibility), pref(eligible_by_rate(problem, eligibility)) {
        scarcity_order.resize(static_cast<std::size_t>(p.n()));
        std::iota(scarcity_order.begin(), scarcity_order.end(), 0);
        std::stable_sort(scarcity_order.begin(), scarcity_order.end(), [&](int a, int b) {
            return scarcity(a) > scarcity(b);
        });
    }

    double scarcity(int dev) const {
        const auto& list = pref[static_cast<std::size_t>(dev)];
        if (list.empty()) {
            return kInf;
        }
        return p.data_bits[static_cast<std::size_t>(dev)] /
               p.rates_bps(dev, list.front());
    }

    // Greedy fill toward per-device rate targets; returns false if some
    // device stays short.
    bool greedy_fill(const std::vector<double>& target, std::vector<int>& rb_owner,
                     std::vector<double>& got) const {
        bool all_met = true;
        for (int dev : scarcity_order) {
            for (int j : pref[static_cast<std::size_t>(dev)]) {
                if (got[static_cast<std::size_t>(dev)] >= target[static_cast<std::size_t>(dev)]) {
                    break;
                }
                if (rb_owner[static_cast<std::size_t>(j)] == -1) {
                    rb_owner[static_cast<std::size_t>(j)] = dev;
                    got[static_cast<std::size_t>(dev)] += p.rates_bps(dev, j);
                }
            }
            if (got[static_cast<std::size_t>(dev)] < target[static_cast<std::size_t>(dev)]) {
                all_met = false;
            }
        }
        return all_met;
    }

    // Feasibility probe at target delay T. Plain greedy first; if it starves
    // a device, retry from a matching that guarantees one RB each.
    bool try_target(double t, std::vector<int>& rb_owner) {
        const int n = p.n();
        const int m = p.m();
        std::vector<double> target(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            target[static_cast<std::size_t>(i)] = p.data_bits[static_cast<std::size_t>(i)] / t;
        }
        rb_owner.assign(static_cast<std::size_t>(m), -1);
        std::vector<double> got(static_cast<std::size_t>(n), 0.0);
        if (greedy_fill(target, rb_owner, got)) {
            return true;
        }

        rb_owner.assign(static_cast<std::size_t>(m), -1);
        got.assign(static_cast<std::size_t>(n), 0.0);
        const auto device_rb = match_devices(n, m, pref);
        for (int i = 0; i < n; ++i) {
            const int j = device_rb[static_cast<std::size_t>(i)];
            if (j == -1) {
                return false;
            }
            rb_owner[static_cast<std::size_t>(j)] = i;
            got[static_cast<std::size_t>(i)] += p.rates_bps(i, j);
        }
        return greedy_fill(target, rb_owner, got);
    }
};

double owner_objective(const RrmProblem& p, const std::vector<int>& rb_owner) {
    std::vector<double> total(static_cast<std::size_t>(p.n()), 0.0);
    for (int j = 0; j < p.m(); ++j) {
        if (rb_owner[static_cast<std::size_t>(j)] >= 0) {
            total[static_cast<std::size_t>(rb_owner[static_cast<std::size_t>(j)])] +=
                p.rates_bps(rb_owner[static_cast<std::size_t>(j)], j);
        }
    }
    double obj = 0.0;
    for (int i = 0; i < p.n(); ++i) {
        if (total[static_cast<std::size_t>(i)] <= 0.0) {
            return kInf;
        }
        obj = std::max(obj, p.data_bits[static_cast<std::size_t>(i)] /
                                total[static_cast<std::size_t>(i)]);
    }
    return obj;
}

// First-improvement local search over single-RB reassignments and pairwise
// owner swaps. Strictly decreasing objective, so it terminates.
void local_search(const RrmProblem& p, const Grid<std::uint8_t>& elig,
                  std::vector<int>& rb_owner) {
    const int n = p.n();
    const int m = p.m();
    double current = owner_objective(p, rb_owner);

    std::vector<int> owned_count(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < m; ++j) {
        if (rb_owner[static_cast<std::size_t>(j)] >= 0) {
            ++owned_count[static_cast<std::size_t>(rb_owner[static_cast<std::size_t>(j)])];
        }
    }

    for (int pass = 0; pass < 1000; ++pass) {
        bool improved = false;
        // Moves: hand RB j to another device (or take it from none).
        for (int j = 0; j < m && !improved; ++j) {
            const int cur = rb_owner[static_cast<std::size_t>(j)];
            if (cur >= 0 && owned_count[static_cast<std::size_t>(cur)] == 1) {
                continue; // would strand the current owner
            }
            for (int dev = 0; dev < n; ++dev) {
                if (dev == cur || !elig(dev, j)) {
                    continue;
                }
                rb_owner[static_cast<std::size_t>(j)] = dev;
                const double candidate = owner_objective(p, rb_owner);
                if (candidate < current) {
                    current = candidate;
                    if (cur >= 0) {
                        --owned_count[static_cast<std::size_t>(cur)];
                    }
                    ++owned_count[static_cast<std::size_t>(dev)];
                    improved = true;
                    break;
                }
                rb_owner[static_cast<std::size_t>(j)] = cur;
            }
        }
        // Swaps: exchange the owners of two RBs.
        for (int j1 = 0; j1 < m && !improved; ++j1) {
            for (int j2 = j1 + 1; j2 < m && !improved; ++j2) {
                const int d1 = rb_owner[static_cast<std::size_t>(j1)];
                const int d2 = rb_owner[static_cast<std::size_t>(j2)];
                if (d1 == d2) {
                    continue;
                }
                const bool ok1 = d2 == -1 || elig(d2, j1);
                const bool ok2 = d1 == -1 || elig(d1, j2);
                if (!ok1 || !ok2) {
                    continue;
                }
                rb_owner[static_cast<std::size_t>(j1)] = d2;
                rb_owner[static_cast<std::size_t>(j2)] = d1;
                const double candidate = owner_objective(p, rb_owner);
                if (candidate < current) {
                    current = candidate;
                    improved = true;
                } else {
                    rb_owner[static_cast<std::size_t>(j1)] = d1;
                    rb_owner[static_cast<std::size_t>(j2)] = d2;
                }
            }
        }
        if (!improved) {
            break;
        }
    }
}

// Iterated descent around local_search: kick a third of the RBs onto random
// eligible owners, re-descend, keep strict improvements. Kicks are seeded by
// the restart index only, so the whole search stays deterministic.
void iterated_descent(const RrmProblem& p, const Grid<std::uint8_t>& elig,
                      std::vector<int>& rb_owner) {
    local_search(p, elig, rb_owner);
    double best = owner_objective(p, rb_owner);
    std::vector<int> best_owner = rb_owner;

    const int n = p.n();
    const int m = p.m();
    constexpr int kKicks = 24;
    for (int kick = 1; kick <= kKicks; ++kick) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(kick) * 0x9e3779b97f4a7c15ULL + 1);
        const int kick_size = std::max(1, kick % 2 == 0 ? m / 2 : m / 3);
        std::vector<int> trial = best_owner;
        for (int t = 0; t < kick_size; ++t) {
            const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
            std::vector<int> cand;
            for (int dev = 0; dev < n; ++dev) {
                if (elig(dev, j) != 0) {
                    cand.push_back(dev);
                }
            }
            if (cand.empty()) {
                continue;
            }
            trial[static_cast<std::size_t>(j)] =
                cand[rng() % cand.size()];
        }
        local_search(p, elig, trial);
        const double objective = owner_objective(p, trial);
        if (objective < best) {
            best = objective;
            best_owner = trial;
        }
    }
    rb_owner = best_owner;
}

RrmSolution solve_heuristic_impl(const RrmProblem& p, double tolerance_s,
                                 const Grid<std::uint8_t>& elig) {
    if (p.n() == 0) {
        return assemble(p, Grid<std::uint8_t>(0, p.m(), 0));
    }
    HeuristicWorkspace ws(p, elig);

    std::vector<int> no_rb;
    for (int i = 0; i < p.n(); ++i) {
        if (ws.pref[static_cast<std::size_t>(i)].empty()) {
            no_rb.push_back(i);
        }
    }
    if (!no_rb.empty()) {
        return infeasible_solution(p, no_rb, elig);
    }
    const auto unserved = uncovered_devices(p, ws.pref);
    if (!unserved.empty()) {
        return infeasible_solution(p, unserved, elig);
    }

    // T_hi: every device served by its single worst eligible RB. At this
    // target any matching meets all needs, so the bracket is feasible.
    double t_hi = 0.0;
    for (int i = 0; i < p.n(); ++i) {
        const auto& list = ws.pref[static_cast<std::size_t>(i)];
        const double worst = p.rates_bps(i, list.back());
        t_hi = std::max(t_hi, p.data_bits[static_cast<std::size_t>(i)] / worst);
    }

    std::vector<int> best_owner;
    if (!ws.try_target(t_hi, best_owner)) {
        return infeasible_solution(p, uncovered_devices(p, ws.pref), elig);
    }

    const double tol = std::max(tolerance_s, 1e-12);
    double lo = 0.0;
    double hi = t_hi;
    std::vector<int> scratch;
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (ws.try_target(mid, scratch)) {
            hi = mid;
            best_owner = scratch;
        } else {
            lo = mid;
        }
    }

    iterated_descent(p, elig, best_owner);

    Grid<std::uint8_t> assignment(p.n(), p.m(), 0);
    for (int j = 0; j < p.m(); ++j) {
        if (best_owner[static_cast<std::size_t>(j)] >= 0) {
            assignment(best_owner[static_cast<std::size_t>(j)], j) = 1;
        }
    }
    return assemble(p, assignment);
}

} // namespace

void RrmProblem::validate_shapes() const {
    if (!rates_bps.same_shape(sinr)) {
        throw validation_error("rrm.sinr", "shape differs from rates_bps");
    }
    const auto count = static_cast<std::size_t>(n());
    if (data_bits.size() != count) {
        throw validation_error("rrm.data_bits", "length differs from device count");
    }
    if (power_w.size() != count) {
        throw validation_error("rrm.power_w", "length differs from device count");
    }
}

std::string violation_kind_name(ConstraintViolation::Kind kind) {
    switch (kind) {
    case ConstraintViolation::Kind::power_bound:
        return "power-bound";
    case ConstraintViolation::Kind::sinr_threshold:
        return "sinr-threshold";
    case ConstraintViolation::Kind::rb_exclusivity:
        return "rb-exclusivity";
    case ConstraintViolation::Kind::unserved_device:
        return "unserved-device";
    }
    return "unknown";
}

RrmProblem build_problem(const Scenario& scenario, const ChannelRealization& realization,
                         std::vector<double> power_w) {
    const int n = realization.gains.rows();
    const int m = realization.gains.cols();
    if (static_cast<int>(power_w.size()) != n) {
        throw validation_error("power_w", "length differs from device count");
    }
    if (static_cast<int>(realization.interference_w.size()) != m) {
        throw validation_error("realization.interference_w", "length differs from RB count");
    }
    for (std::size_t i = 0; i < power_w.size(); ++i) {
        if (power_w[i] < 0.0 || power_w[i] > scenario.p_max_w) {
            throw validation_error("power_w",
                                   "entry " + std::to_string(i) + " outside [0, p_max]");
        }
    }

    RrmProblem p;
    p.rates_bps = Grid<double>(n, m);
    p.sinr = Grid<double>(n, m);
    p.beta = scenario.beta;
    p.p_max_w = scenario.p_max_w;
    p.power_w = std::move(power_w);
    p.data_bits.reserve(static_cast<std::size_t>(n));
    p.device_ids.reserve(static_cast<std::size_t>(n));
    for (const auto& dev : scenario.devices) {
        p.data_bits.push_back(static_cast<double>(dev.data_bits));
        p.device_ids.push_back(dev.id);
    }
    if (static_cast<int>(p.data_bits.size()) != n) {
        throw validation_error("realization.gains", "row count differs from device count");
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double g = realization.gains(i, j);
            const double s = sinr(g, p.power_w[static_cast<std::size_t>(i)],
                                  realization.interference_w[static_cast<std::size_t>(j)],
                                  scenario.channel.noise_power_w);
            p.sinr(i, j) = s;
            p.rates_bps(i, j) = rate(scenario.channel.rb_bandwidth_hz, s);
        }
    }
    return p;
}

RrmSolution solve_exact(const RrmProblem& problem) {
    problem.validate_shapes();
    if (problem.n() > kMaxExactDevices || problem.m() > kMaxExactRbs) {
        std::ostringstream msg;
        msg << "exact solver guard exceeded: N=" << problem.n() << ", M=" << problem.m()
            << " (limits N<=" << kMaxExactDevices << ", M<=" << kMaxExactRbs << ")";
        throw instance_too_large_error(msg.str());
    }
    return solve_exact_impl(problem, beta_eligibility(problem));
}

RrmSolution solve_heuristic(const RrmProblem& problem, double tolerance_s) {
    problem.validate_shapes();
    return solve_heuristic_impl(problem, tolerance_s, beta_eligibility(problem));
}

std::vector<ConstraintViolation> check_constraints(const Scenario& scenario,
                                                   const RrmProblem& problem,
                                                   const RrmSolution& solution) {
    (void)scenario; // bounds travel with the problem
    std::vector<ConstraintViolation> out;
    const int n = problem.n();
    const int m = problem.m();

    for (int i = 0; i < n && i < static_cast<int>(solution.power_w.size()); ++i) {
        const double pw = solution.power_w[static_cast<std::size_t>(i)];
        if (pw < 0.0 || pw > problem.p_max_w) {
            ConstraintViolation v;
            v.kind = ConstraintViolation::Kind::power_bound;
            v.device = device_label(problem, i);
            std::ostringstream detail;
            detail << "p=" << pw << " W outside [0, " << problem.p_max_w << "] W";
            v.detail = detail.str();
            out.push_back(std::move(v));
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (solution.assignment(i, j) && problem.sinr(i, j) < problem.beta) {
                ConstraintViolation v;
                v.kind = ConstraintViolation::Kind::sinr_threshold;
                v.device = device_label(problem, i);
                v.rb = j;
                std::ostringstream detail;
                detail << "sinr=" << problem.sinr(i, j) << " below beta=" << problem.beta;
                v.detail = detail.str();
                out.push_back(std::move(v));
            }
        }
    }

    for (int j = 0; j < m; ++j) {
        int users = 0;
        bool binary = true;
        for (int i = 0; i < n; ++i) {
            const auto b = solution.assignment(i, j);
            if (b != 0 && b != 1) {
                binary = false;
            }
            if (b != 0) {
                ++users;
            }
        }
        if (!binary || users > 1) {
            ConstraintViolation v;
            v.kind = ConstraintViolation::Kind::rb_exclusivity;
            v.rb = j;
            v.detail = binary ? "assigned to " + std::to_string(users) + " devices"
                              : "non-binary assignment indicator";
            out.push_back(std::move(v));
        }
    }

    for (int i = 0; i < n; ++i) {
        bool served = false;
        for (int j = 0; j < m; ++j) {
            if (solution.assignment(i, j)) {
                served = true;
                break;
            }
        }
        if (!served) {
            ConstraintViolation v;
            v.kind = ConstraintViolation::Kind::unserved_device;
            v.device = device_label(problem, i);
            v.detail = "no RB assigned";
            out.push_back(std::move(v));
        }
    }
    return out;
}

RrmSolution reflexion_solve(const Scenario& scenario, const ChannelRealization& realization,
                            int max_rounds) {
    if (max_rounds < 1) {
        throw validation_error("max_rounds", "must be >= 1");
    }
    const int n = realization.gains.rows();
    const int m = realization.gains.cols();
    const std::vector<double> power(static_cast<std::size_t>(n), scenario.p_max_w);

    // Power is pinned, so rates never change across rounds.
    const RrmProblem problem = build_problem(scenario, realization, power);

    Grid<std::uint8_t> forbidden(n, m, 0);
    std::vector<std::vector<ConstraintViolation>> history;
    RrmSolution sol;

    for (int round = 0; round < max_rounds; ++round) {
        const auto elig = relaxed_eligibility(problem, forbidden);
        sol = (n <= kMaxExactDevices && m <= kMaxExactRbs)
                  ? solve_exact_impl(problem, elig)
                  : solve_heuristic_impl(problem, 1e-4, elig);

        auto viols = check_constraints(scenario, problem, sol);
        history.push_back(viols);
        if (viols.empty()) {
            sol.feasible = true;
            sol.violations.clear();
            break;
        }
        sol.feasible = false;
        sol.violations = viols;

        bool forbade = false;
        for (const auto& v : viols) {
            if (v.kind == ConstraintViolation::Kind::sinr_threshold && v.device && v.rb) {
                for (int i = 0; i < n; ++i) {
                    if (device_label(problem, i) == *v.device) {
                        forbidden(i, *v.rb) = 1;
                        forbade = true;
                    }
                }
            }
        }
        if (!forbade) {
            break; // nothing left to repair by masking
        }
    }

    sol.round_history = std::move(history);
    return sol;
}

nlohmann::ordered_json solution_to_json(const RrmSolution& solution,
                                        const RrmProblem& problem) {
    nlohmann::ordered_json doc;
    doc["feasible"] = solution.feasible;
    doc["max_delay_s"] = solution.max_delay_s;

    auto assignment = nlohmann::ordered_json::array();
    for (int i = 0; i < solution.assignment.rows(); ++i) {
        for (int j = 0; j < solution.assignment.cols(); ++j) {
            if (solution.assignment(i, j)) {
                assignment.push_back({{"device", device_label(problem, i)}, {"rb", j}});
            }
        }
    }
    doc["assignment"] = std::move(assignment);

    auto delays = nlohmann::ordered_json::array();
    for (int i = 0; i < static_cast<int>(solution.per_device_delay_s.size()); ++i) {
        const double d = solution.per_device_delay_s[static_cast<std::size_t>(i)];
        delays.push_back({{"device", device_label(problem, i)},
                          {"delay_s", std::isfinite(d) ? nlohmann::ordered_json(d)
                                                       : nlohmann::ordered_json(nullptr)}});
    }
    doc["per_device_delay_s"] = std::move(delays);
    doc["power_w"] = solution.power_w;

    auto render = [&](const ConstraintViolation& v) {
        nlohmann::ordered_json item;
        item["kind"] = violation_kind_name(v.kind);
        if (v.device) {
            item["device"] = *v.device;
        }
        if (v.rb) {
            item["rb"] = *v.rb;
        }
        item["detail"] = v.detail;
        return item;
    };

    auto violations = nlohmann::ordered_json::array();
    for (const auto& v : solution.violations) {
        violations.push_back(render(v));
    }
    doc["violations"] = std::move(violations);

    auto rounds = nlohmann::ordered_json::array();
    for (const auto& round : solution.round_history) {
        auto list = nlohmann::ordered_json::array();
        for (const auto& v : round) {
            list.push_back(render(v));
        }
        rounds.push_back(std::move(list));
    }
    doc["rounds"] = std::move(rounds);
    return doc;
}

} // namespace dtlink
