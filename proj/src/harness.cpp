// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dtlink/channel.hpp"
#include "dtlink/errors.hpp"

namespace dtlink {

std::uint64_t fnv1a(std::string_view text, std::uint64_t seed) {
    std::uint64_t hash = seed;
    for (const char c : text) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::uint64_t config_digest(const PipelineInputs& inputs) {
    std::ostringstream blob;
    blob << scenario_to_json(inputs.scenario).dump() << '\n'
         << inputs.query << '\n'
         << inputs.seed << '\n'
         << inputs.horizon_minutes << '\n'
         << inputs.step_limit << '\n'
         << inputs.max_rounds << '\n'
         << inputs.default_cell << '\n'
         << (inputs.predictor ? inputs.predictor->name() : "naive-last");
    return fnv1a(blob.str());
}

std::string fmt_double(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    return nlohmann::ordered_json(value).dump();
}

namespace {

// Everything stage two needs that does not depend on tau.
struct StageTwo {
    std::vector<IoTDevice> devices; // converted order
    Scenario full;                  // inputs.scenario with converted devices
    ChannelRealization realization; // drawn once over all devices
    std::map<std::string, TrafficSeries> forecasts; // per cell actually used
    std::vector<std::string> device_cell;           // parallel to devices
};

ChannelRealization subset_rows(const ChannelRealization& realization,
                               const std::vector<std::size_t>& rows) {
    ChannelRealization out;
    out.seed = realization.seed;
    out.interference_w = realization.interference_w;
    out.gains = Grid<double>(rows.size(), realization.gains.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < realization.gains.cols(); ++j) {
            out.gains(i, j) = realization.gains(rows[i], j);
        }
    }
    return out;
}

StageTwo prepare_stage_two(const PipelineInputs& inputs, const ConversionReport& report) {
    StageTwo ctx;
    for (const auto& dev : report.device_params) {
        ctx.devices.push_back({dev.sensor_id, dev.position_m, dev.data_bits, dev.sensor_type});
    }
    if (ctx.devices.empty()) {
        throw validation_error("pipeline.devices",
                               "no plan entry could be converted to a device");
    }

    ctx.full = inputs.scenario;
    ctx.full.devices = ctx.devices;
    ctx.full.validate();
    ctx.realization = draw_realization(ctx.full, inputs.seed);

    std::shared_ptr<Predictor> predictor = inputs.predictor;
    NaiveLastPredictor fallback;
    for (const auto& dev : ctx.devices) {
        const std::string cell =
            inputs.traffic.count(dev.id) != 0 ? dev.id : inputs.default_cell;
        ctx.device_cell.push_back(cell);
        if (ctx.forecasts.count(cell) != 0) {
            continue;
        }
        auto it = inputs.traffic.find(cell);
        if (it == inputs.traffic.end()) {
            throw validation_error("pipeline.traffic",
                                   "no traffic series for cell '" + cell + "'");
        }
        const auto context = rescale(it->second, inputs.horizon_minutes);
        const int steps = forecast_steps(inputs.horizon_minutes, context.bucket_minutes);
        Predictor& p = predictor ? *predictor : static_cast<Predictor&>(fallback);
        ctx.forecasts.emplace(cell, predict(p, context, steps));
    }
    return ctx;
}

struct RoutedSolve {
    std::vector<DeviceOutcome> outcomes;
    std::optional<RrmProblem> problem;
    std::optional<RrmSolution> solution;
    double max_latency_s = 0.0;
    int n_cellular = 0;
    int n_zigbee = 0;
};

RoutedSolve solve_at_tau(const PipelineInputs& inputs, const StageTwo& ctx, double tau) {
    RoutedSolve out;
    std::vector<std::size_t> cellular;
    std::vector<Route> routes(ctx.devices.size());
    for (std::size_t i = 0; i < ctx.devices.size(); ++i) {
        routes[i] = gate(ctx.forecasts.at(ctx.device_cell[i]), tau);
        if (routes[i] == Route::cellular_6g) {
            cellular.push_back(i);
        }
    }

    std::vector<double> latency(ctx.devices.size(), 0.0);
    if (!cellular.empty()) {
        Scenario sub = ctx.full;
        sub.devices.clear();
        for (const auto idx : cellular) {
            sub.devices.push_back(ctx.devices[idx]);
        }
        const auto subreal = subset_rows(ctx.realization, cellular);
        auto solution = reflexion_solve(sub, subreal, inputs.max_rounds);
        out.problem = build_problem(sub, subreal, solution.power_w);
        for (std::size_t k = 0; k < cellular.size(); ++k) {
            latency[cellular[k]] = solution.per_device_delay_s[k];
        }
        out.solution = std::move(solution);
    }

    for (std::size_t i = 0; i < ctx.devices.size(); ++i) {
        if (routes[i] == Route::zigbee_fallback) {
            latency[i] = zigbee_delay(ctx.devices[i], inputs.scenario.zigbee);
            ++out.n_zigbee;
        } else {
            ++out.n_cellular;
        }
        out.outcomes.push_back({ctx.devices[i].id, routes[i], latency[i]});
        out.max_latency_s = std::max(out.max_latency_s, latency[i]);
    }
    return out;
}

} // namespace

PipelineResult run_pipeline(const PipelineInputs& inputs, LlmBackend& backend) {
    const auto tools = standard_tools(inputs.registry, inputs.gazetteer);
    auto planning =
        run_planning(inputs.query, inputs.cards, tools, backend, inputs.step_limit);

    const LatLon origin =
        inputs.scenario.geo_origin ? *inputs.scenario.geo_origin : inputs.registry.centroid();
    auto report = convert(planning.plan, inputs.registry, origin);

    const auto ctx = prepare_stage_two(inputs, report);
    auto routed = solve_at_tau(inputs, ctx, inputs.scenario.tau);

    PipelineResult result;
    result.plan = std::move(planning.plan);
    result.conversion = std::move(report);
    result.steps_used = static_cast<int>(planning.transcript.steps.size());
    if (inputs.gold) {
        result.plan_accuracy = plan_accuracy(result.plan, *inputs.gold);
    }
    result.devices = std::move(routed.outcomes);
    result.rrm_problem = std::move(routed.problem);
    result.rrm_solution = std::move(routed.solution);
    result.max_latency_s = routed.max_latency_s;
    result.config_digest = config_digest(inputs);
    return result;
}

std::vector<SweepRow> sweep_tau(const PipelineInputs& inputs, LlmBackend& backend,
                                std::vector<double> tau_values) {
    if (tau_values.empty()) {
        throw validation_error("tau_values", "sweep needs at least one tau");
    }
    for (const double tau : tau_values) {
        if (!(tau >= 0.0 && tau <= 1.0)) {
            throw validation_error("tau_values", "tau must lie in [0,1], got " + fmt_double(tau));
        }
    }
    std::sort(tau_values.begin(), tau_values.end());

    const auto tools = standard_tools(inputs.registry, inputs.gazetteer);
    auto planning =
        run_planning(inputs.query, inputs.cards, tools, backend, inputs.step_limit);
    const LatLon origin =
        inputs.scenario.geo_origin ? *inputs.scenario.geo_origin : inputs.registry.centroid();
    const auto report = convert(planning.plan, inputs.registry, origin);
    const auto ctx = prepare_stage_two(inputs, report);

    std::vector<SweepRow> rows;
    for (const double tau : tau_values) {
        const auto routed = solve_at_tau(inputs, ctx, tau);
        rows.push_back({tau, routed.max_latency_s, routed.n_cellular, routed.n_zigbee});
    }
    return rows;
}

std::vector<EvalRow> eval_accuracy(const std::filesystem::path& fixture_path,
                                   const CardSet& cards, const SensorRegistry& registry,
                                   const Gazetteer& gazetteer, int step_limit) {
    std::ifstream in(fixture_path);
    if (!in) {
        throw parse_error("cannot open query fixture: " + fixture_path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("query fixture " + fixture_path.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw parse_error("query fixture must be a JSON array");
    }

    const auto tools = standard_tools(registry, gazetteer);
    std::vector<EvalRow> rows;
    for (const auto& item : doc) {
        EvalRow row;
        row.query_id = item.at("id").get<std::string>();
        const auto query = item.at("query").get<std::string>();

        RetrievalPlan gold;
        gold.query = query;
        for (const auto& id : item.at("gold_sensor_ids")) {
            PlanEntry entry;
            entry.sensor_id = id.get<std::string>();
            gold.entries.push_back(std::move(entry));
        }

        auto backend = MockBackend::from_json_text(item.at("script").dump());
        try {
            auto result = run_planning(query, cards, tools, backend, step_limit);
            row.f1 = plan_accuracy(result.plan, gold);
            row.steps_used = static_cast<int>(result.transcript.steps.size());
        } catch (const plan_parse_error& e) {
            row.f1 = 0.0;
            row.steps_used = static_cast<int>(e.transcript().steps.size());
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::ordered_json pipeline_result_to_json(const PipelineResult& result) {
    nlohmann::ordered_json doc;
    {
        std::ostringstream hex;
        hex << std::hex << result.config_digest;
        doc["config_digest"] = hex.str();
    }
    doc["steps_used"] = result.steps_used;
    if (result.plan_accuracy) {
        doc["plan_accuracy"] = *result.plan_accuracy;
    }
    doc["plan"] = plan_to_json(result.plan);
    doc["conversion"] = report_to_json(result.conversion);
    doc["devices"] = nlohmann::ordered_json::array();
    for (const auto& dev : result.devices) {
        nlohmann::ordered_json d;
        d["device"] = dev.device_id;
        d["route"] = route_name(dev.route);
        if (std::isfinite(dev.latency_s)) {
            d["latency_s"] = dev.latency_s;
        } else {
            d["latency_s"] = nullptr;
        }
        doc["devices"].push_back(std::move(d));
    }
    if (result.rrm_solution && result.rrm_problem) {
        doc["rrm"] = solution_to_json(*result.rrm_solution, *result.rrm_problem);
    } else {
        doc["rrm"] = nullptr;
    }
    if (std::isfinite(result.max_latency_s)) {
        doc["max_latency_s"] = result.max_latency_s;
    } else {
        doc["max_latency_s"] = nullptr;
    }
    return doc;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "tau,max_latency_s,n_cellular,n_zigbee\n";
    for (const auto& row : rows) {
        out << fmt_double(row.tau) << ',' << fmt_double(row.max_latency_s) << ','
            << row.n_cellular << ',' << row.n_zigbee << '\n';
    }
    return out.str();
}

std::string eval_to_csv(const std::vector<EvalRow>& rows) {
    std::ostringstream out;
    out << "query_id,f1,steps_used\n";
    for (const auto& row : rows) {
        out << row.query_id << ',' << fmt_double(row.f1) << ',' << row.steps_used << '\n';
    }
    return out.str();
}

} // namespace dtlink
