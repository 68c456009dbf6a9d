// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// dtlink: one binary exposing each pipeline stage plus the full run.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dtlink/channel.hpp"
#include "dtlink/errors.hpp"
#include "dtlink/harness.hpp"

#include "CLI11.hpp"

namespace {

using namespace dtlink;

void write_out(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (text.empty() || text.back() != '\n') {
            std::cout << '\n';
        }
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw parse_error("cannot open output file: " + out_path);
    }
    out << text;
}

std::unique_ptr<LlmBackend> make_backend(const std::string& kind,
                                         const std::string& script_path) {
    if (kind == "mock") {
        if (script_path.empty()) {
            throw validation_error("--script", "mock backend needs a script file");
        }
        return std::make_unique<MockBackend>(MockBackend::from_file(script_path));
    }
    if (kind == "live") {
        return std::make_unique<HttpChatBackend>(HttpChatBackend::from_env());
    }
    throw validation_error("--backend", "unknown backend '" + kind + "'");
}

std::shared_ptr<Predictor> make_predictor(const std::string& kind, int period_buckets) {
    if (kind == "naive-last") {
        return std::make_shared<NaiveLastPredictor>();
    }
    if (kind == "moving-average") {
        return std::make_shared<MovingAveragePredictor>();
    }
    if (kind == "seasonal-naive") {
        return std::make_shared<SeasonalNaivePredictor>(period_buckets);
    }
    if (kind == "remote") {
        return std::make_shared<RemotePredictor>(RemotePredictor::from_env());
    }
    throw validation_error("--predictor", "unknown predictor '" + kind + "'");
}

struct CommonArgs {
    std::string scenario_path;
    std::uint64_t seed = 1;
    std::string backend = "mock";
    std::string out_path;
};

struct PipelineArgs {
    std::string query;
    std::string script_path;
    std::string sensors_path;
    std::string apis_path;
    std::string registry_path;
    std::string gazetteer_path;
    std::string traffic_path;
    std::string gold_path;
    std::string default_cell = "default";
    std::string predictor = "naive-last";
    int period_buckets = 24;
    int horizon_minutes = 600;
    int step_limit = kDefaultStepLimit;
    int max_rounds = 8;
};

PipelineInputs load_inputs(const CommonArgs& common, const PipelineArgs& args) {
    PipelineInputs inputs;
    inputs.scenario = load_scenario(common.scenario_path);
    inputs.query = args.query;
    inputs.cards = load_cards(args.sensors_path, args.apis_path);
    inputs.registry = SensorRegistry::load_csv(args.registry_path);
    inputs.gazetteer = Gazetteer::load_json(args.gazetteer_path);
    inputs.traffic = load_traffic_csv(args.traffic_path);
    inputs.default_cell = args.default_cell;
    inputs.horizon_minutes = args.horizon_minutes;
    inputs.step_limit = args.step_limit;
    inputs.max_rounds = args.max_rounds;
    inputs.predictor = make_predictor(args.predictor, args.period_buckets);
    inputs.seed = common.seed;
    if (!args.gold_path.empty()) {
        std::ifstream in(args.gold_path);
        if (!in) {
            throw parse_error("cannot open gold plan: " + args.gold_path);
        }
        nlohmann::json doc;
        in >> doc;
        inputs.gold = plan_from_json(doc);
    }
    return inputs;
}

int cmd_simulate(const CommonArgs& common) {
    const auto scenario = load_scenario(common.scenario_path);
    const auto realization = draw_realization(scenario, common.seed);

    nlohmann::ordered_json doc;
    doc["seed"] = realization.seed;
    doc["devices"] = nlohmann::ordered_json::array();
    const auto n = scenario.devices.size();
    const auto m = static_cast<std::size_t>(scenario.num_rbs);
    for (std::size_t i = 0; i < n; ++i) {
        nlohmann::ordered_json dev;
        dev["id"] = scenario.devices[i].id;
        dev["gain"] = nlohmann::ordered_json::array();
        dev["sinr"] = nlohmann::ordered_json::array();
        dev["rate_bps"] = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m; ++j) {
            const double g = realization.gains(i, j);
            const double s = sinr(g, scenario.p_max_w, realization.interference_w[j],
                                  scenario.channel.noise_power_w);
            dev["gain"].push_back(g);
            dev["sinr"].push_back(s);
            dev["rate_bps"].push_back(rate(scenario.channel.rb_bandwidth_hz, s));
        }
        doc["devices"].push_back(std::move(dev));
    }
    doc["interference_w"] = realization.interference_w;
    write_out(common.out_path, doc.dump(2) + "\n");
    return 0;
}

int cmd_solve(const CommonArgs& common, const std::string& solver, int max_rounds) {
    const auto scenario = load_scenario(common.scenario_path);
    const auto realization = draw_realization(scenario, common.seed);

    RrmSolution solution;
    std::vector<double> power(scenario.devices.size(), scenario.p_max_w);
    auto problem = build_problem(scenario, realization, power);
    if (solver == "exact") {
        solution = solve_exact(problem);
    } else if (solver == "heuristic") {
        solution = solve_heuristic(problem);
    } else if (solver == "reflexion") {
        solution = reflexion_solve(scenario, realization, max_rounds);
    } else {
        throw validation_error("--solver", "unknown solver '" + solver + "'");
    }
    write_out(common.out_path, solution_to_json(solution, problem).dump(2) + "\n");
    return solution.feasible ? 0 : 3;
}

int cmd_plan(const CommonArgs& common, const PipelineArgs& args) {
    const auto cards = load_cards(args.sensors_path, args.apis_path);
    const auto registry = SensorRegistry::load_csv(args.registry_path);
    const auto gazetteer = Gazetteer::load_json(args.gazetteer_path);
    const auto tools = standard_tools(registry, gazetteer);
    auto backend = make_backend(common.backend, args.script_path);

    auto result = run_planning(args.query, cards, tools, *backend, args.step_limit);
    nlohmann::ordered_json doc;
    doc["plan"] = plan_to_json(result.plan);
    doc["transcript"] = transcript_to_json(result.transcript);
    write_out(common.out_path, doc.dump(2) + "\n");
    return 0;
}

int cmd_predict(const CommonArgs& common, const PipelineArgs& args, const std::string& cell) {
    const auto traffic = load_traffic_csv(args.traffic_path);
    auto it = traffic.find(cell);
    if (it == traffic.end()) {
        throw validation_error("--cell", "no traffic series for cell '" + cell + "'");
    }
    const auto context = rescale(it->second, args.horizon_minutes);
    const int steps = forecast_steps(args.horizon_minutes, context.bucket_minutes);
    auto predictor = make_predictor(args.predictor, args.period_buckets);
    const auto forecast = predict(*predictor, context, steps);

    nlohmann::ordered_json doc;
    doc["cell"] = cell;
    doc["bucket_minutes"] = forecast.bucket_minutes;
    doc["start_time_s"] = forecast.start_time_s;
    doc["steps"] = steps;
    doc["predictor"] = predictor->name();
    doc["forecast"] = forecast.values;
    write_out(common.out_path, doc.dump(2) + "\n");
    return 0;
}

int cmd_pipeline(const CommonArgs& common, const PipelineArgs& args) {
    const auto inputs = load_inputs(common, args);
    auto backend = make_backend(common.backend, args.script_path);
    const auto result = run_pipeline(inputs, *backend);
    write_out(common.out_path, pipeline_result_to_json(result).dump(2) + "\n");
    return 0;
}

int cmd_sweep(const CommonArgs& common, const PipelineArgs& args, std::vector<double> taus) {
    const auto inputs = load_inputs(common, args);
    auto backend = make_backend(common.backend, args.script_path);
    if (taus.empty()) {
        for (int i = 0; i <= 10; ++i) {
            taus.push_back(static_cast<double>(i) / 10.0);
        }
    }
    const auto rows = sweep_tau(inputs, *backend, std::move(taus));
    write_out(common.out_path, sweep_to_csv(rows));
    return 0;
}

int cmd_eval(const CommonArgs& common, const PipelineArgs& args,
             const std::string& queries_path) {
    const auto cards = load_cards(args.sensors_path, args.apis_path);
    const auto registry = SensorRegistry::load_csv(args.registry_path);
    const auto gazetteer = Gazetteer::load_json(args.gazetteer_path);
    const auto rows =
        eval_accuracy(queries_path, cards, registry, gazetteer, args.step_limit);
    write_out(common.out_path, eval_to_csv(rows));
    return 0;
}

const char* stage_of(const std::exception& e) {
    if (dynamic_cast<const plan_parse_error*>(&e) != nullptr) return "planning";
    if (dynamic_cast<const backend_error*>(&e) != nullptr) return "backend";
    if (dynamic_cast<const insufficient_history_error*>(&e) != nullptr) return "forecast";
    if (dynamic_cast<const insufficient_context_error*>(&e) != nullptr) return "forecast";
    if (dynamic_cast<const instance_too_large_error*>(&e) != nullptr) return "rrm";
    if (dynamic_cast<const validation_error*>(&e) != nullptr) return "validation";
    if (dynamic_cast<const parse_error*>(&e) != nullptr) return "input";
    return "internal";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LINKs-style desk-scale pipeline: plan, convert, gate, allocate"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs common;
    app.add_option("--scenario", common.scenario_path, "scenario JSON file");
    app.add_option("--seed", common.seed, "RNG seed");
    app.add_option("--backend", common.backend, "LLM backend: mock|live")
        ->check(CLI::IsMember({"mock", "live"}));
    app.add_option("--out", common.out_path, "output file ('-' for stdout)");

    PipelineArgs pa;
    std::string solver = "reflexion";
    std::string cell = "default";
    std::string queries_path;
    std::vector<double> taus;

    auto* simulate = app.add_subcommand("simulate", "draw one channel realization");

    auto* solve = app.add_subcommand("solve", "solve the RRM problem for a scenario");
    solve->add_option("--solver", solver, "exact|heuristic|reflexion")
        ->check(CLI::IsMember({"exact", "heuristic", "reflexion"}));
    solve->add_option("--max-rounds", pa.max_rounds, "reflexion round budget");

    auto add_plan_opts = [&pa](CLI::App* cmd) {
        cmd->add_option("--query", pa.query, "user query text");
        cmd->add_option("--script", pa.script_path, "mock backend script JSON");
        cmd->add_option("--sensors", pa.sensors_path, "sensor cards JSON");
        cmd->add_option("--apis", pa.apis_path, "data API cards JSON");
        cmd->add_option("--registry", pa.registry_path, "sensor registry CSV");
        cmd->add_option("--gazetteer", pa.gazetteer_path, "place-name gazetteer JSON");
        cmd->add_option("--step-limit", pa.step_limit, "agent step budget");
    };
    auto add_traffic_opts = [&pa](CLI::App* cmd) {
        cmd->add_option("--traffic", pa.traffic_path, "traffic CSV");
        cmd->add_option("--default-cell", pa.default_cell, "cell for unmapped devices");
        cmd->add_option("--horizon", pa.horizon_minutes, "forecast horizon, minutes");
        cmd->add_option("--predictor", pa.predictor,
                        "naive-last|moving-average|seasonal-naive|remote");
        cmd->add_option("--period-buckets", pa.period_buckets,
                        "seasonal-naive period, buckets");
    };

    auto* plan = app.add_subcommand("plan", "run the planning loop only");
    add_plan_opts(plan);

    auto* predictc = app.add_subcommand("predict", "rescale and forecast one cell");
    predictc->add_option("--cell", cell, "traffic cell id");
    add_traffic_opts(predictc);

    auto* pipeline = app.add_subcommand("pipeline", "full query-to-latency run");
    add_plan_opts(pipeline);
    add_traffic_opts(pipeline);
    pipeline->add_option("--gold", pa.gold_path, "gold plan JSON for accuracy");
    pipeline->add_option("--max-rounds", pa.max_rounds, "reflexion round budget");

    auto* sweep = app.add_subcommand("sweep-tau", "latency across tau values");
    add_plan_opts(sweep);
    add_traffic_opts(sweep);
    sweep->add_option("--tau", taus, "tau values (repeatable; default 0..1 by 0.1)");
    sweep->add_option("--max-rounds", pa.max_rounds, "reflexion round budget");

    auto* evalc = app.add_subcommand("eval-accuracy", "score scripted queries against golds");
    add_plan_opts(evalc);
    evalc->add_option("--queries", queries_path, "query fixture JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(common);
        if (solve->parsed()) return cmd_solve(common, solver, pa.max_rounds);
        if (plan->parsed()) return cmd_plan(common, pa);
        if (predictc->parsed()) return cmd_predict(common, pa, cell);
        if (pipeline->parsed()) return cmd_pipeline(common, pa);
        if (sweep->parsed()) return cmd_sweep(common, pa, taus);
        if (evalc->parsed()) return cmd_eval(common, pa, queries_path);
    } catch (const std::exception& e) {
        std::cerr << "dtlink: [" << stage_of(e) << "] " << e.what() << "\n";
        return 1;
    }
    return 0;
}
