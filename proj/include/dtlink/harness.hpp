// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// End-to-end pipeline: query -> plan -> convert -> forecast/gate -> RRM or
// Zigbee -> latency report. Also the tau sweep and the planning-accuracy
// evaluator. One channel realization is drawn per run (and shared across a
// sweep) so routing is the only thing tau moves.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtlink/cards.hpp"
#include "dtlink/convertor.hpp"
#include "dtlink/llm.hpp"
#include "dtlink/plan.hpp"
#include "dtlink/planner.hpp"
#include "dtlink/registry.hpp"
#include "dtlink/rrm.hpp"
#include "dtlink/scenario.hpp"
#include "dtlink/traffic.hpp"

#include "json.hpp"

namespace dtlink {

struct DeviceOutcome {
    std::string device_id;
    Route route;
    double latency_s = 0.0;
};

struct PipelineInputs {
    Scenario scenario;
    std::string query;
    CardSet cards;
    SensorRegistry registry;
    Gazetteer gazetteer;
    std::map<std::string, TrafficSeries> traffic; // keyed by cell id
    std::string default_cell;                     // used when a device has no own cell
    int horizon_minutes = 600;
    int step_limit = kDefaultStepLimit;
    int max_rounds = 8;
    std::optional<RetrievalPlan> gold;
    std::shared_ptr<Predictor> predictor; // defaults to naive-last when null
    std::uint64_t seed = 1;
};

struct PipelineResult {
    RetrievalPlan plan;
    ConversionReport conversion;
    std::optional<double> plan_accuracy;
    int steps_used = 0;
    std::vector<DeviceOutcome> devices; // converted-device order
    std::optional<RrmProblem> rrm_problem; // cellular subset, subset order
    std::optional<RrmSolution> rrm_solution;
    double max_latency_s = 0.0;
    std::uint64_t config_digest = 0;
};

struct SweepRow {
    double tau = 0.0;
    double max_latency_s = 0.0;
    int n_cellular = 0;
    int n_zigbee = 0;
};

struct EvalRow {
    std::string query_id;
    double f1 = 0.0;
    int steps_used = 0;
};

PipelineResult run_pipeline(const PipelineInputs& inputs, LlmBackend& backend);

// one row per tau, sorted ascending; plan and channel realization are shared
std::vector<SweepRow> sweep_tau(const PipelineInputs& inputs, LlmBackend& backend,
                                std::vector<double> tau_values);

// fixture: JSON array of {id, query, gold_sensor_ids, script}; each query
// runs against its own scripted mock backend
std::vector<EvalRow> eval_accuracy(const std::filesystem::path& fixture_path,
                                   const CardSet& cards, const SensorRegistry& registry,
                                   const Gazetteer& gazetteer,
                                   int step_limit = kDefaultStepLimit);

nlohmann::ordered_json pipeline_result_to_json(const PipelineResult& result);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string eval_to_csv(const std::vector<EvalRow>& rows);

// FNV-1a over the canonical serialization of everything that shapes a run
std::uint64_t fnv1a(std::string_view text, std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t config_digest(const PipelineInputs& inputs);

// shortest decimal form that round-trips; used for stable CSV cells
std::string fmt_double(double value);

} // namespace dtlink
