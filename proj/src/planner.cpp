// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/planner.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "dtlink/errors.hpp"

namespace dtlink {

const AgentRole kFallbackOrder[5] = {AgentRole::planner, AgentRole::reviewer, AgentRole::coder,
                                     AgentRole::executor, AgentRole::reviewer};

void ToolRegistry::register_tool(const std::string& name, ToolFn fn) {
    tools_[name] = std::move(fn);
}

nlohmann::json ToolRegistry::dispatch(const std::string& name,
                                      const nlohmann::json& args) const {
    auto it = tools_.find(name);
    if (it == tools_.end()) {
        return {{"error", "unknown tool '" + name + "'"}};
    }
    try {
        return it->second(args);
    } catch (const std::exception& e) {
        return {{"error", std::string("tool '") + name + "' failed: " + e.what()}};
    }
}

std::vector<std::string> ToolRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, fn] : tools_) {
        out.push_back(name);
    }
    return out;
}

ToolRegistry standard_tools(const SensorRegistry& registry, const Gazetteer& gazetteer) {
    ToolRegistry tools;
    tools.register_tool("geocode", [&gazetteer](const nlohmann::json& args) -> nlohmann::json {
        const auto place = args.at("place").get<std::string>();
        auto pos = gazetteer.lookup(place);
        if (!pos) {
            return {{"error", "unknown place '" + place + "'"}};
        }
        return {{"place", place}, {"lat_deg", pos->lat_deg}, {"lon_deg", pos->lon_deg}};
    });
    tools.register_tool("find_sensors", [&registry](const nlohmann::json& args)
                                            -> nlohmann::json {
        std::vector<const SensorRecord*> hits;
        if (args.contains("type")) {
            hits = registry.by_type(args.at("type").get<std::string>());
        } else {
            for (const auto& rec : registry.records()) {
                hits.push_back(&rec);
            }
        }
        if (args.contains("center") && args.contains("radius_km")) {
            LatLon center{args.at("center").at("lat_deg").get<double>(),
                          args.at("center").at("lon_deg").get<double>()};
            auto nearby = registry.within_radius(center, args.at("radius_km").get<double>());
            std::set<const SensorRecord*> keep(nearby.begin(), nearby.end());
            std::erase_if(hits, [&keep](const SensorRecord* r) { return keep.count(r) == 0; });
        }
        nlohmann::json sensors = nlohmann::json::array();
        for (const auto* rec : hits) {
            sensors.push_back({{"sensor_id", rec->sensor_id},
                               {"type", rec->type},
                               {"lat_deg", rec->lat_deg},
                               {"lon_deg", rec->lon_deg},
                               {"record_bytes", rec->record_bytes},
                               {"records_per_hour", rec->records_per_hour}});
        }
        return {{"sensors", sensors}};
    });
    tools.register_tool("sensor_info", [&registry](const nlohmann::json& args)
                                           -> nlohmann::json {
        const auto id = args.at("sensor_id").get<std::string>();
        const auto* rec = registry.find(id);
        if (rec == nullptr) {
            return {{"error", "unknown sensor '" + id + "'"}};
        }
        return {{"sensor_id", rec->sensor_id},
                {"type", rec->type},
                {"lat_deg", rec->lat_deg},
                {"lon_deg", rec->lon_deg},
                {"record_bytes", rec->record_bytes},
                {"records_per_hour", rec->records_per_hour}};
    });
    return tools;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string first_token(const std::string& text) {
    std::istringstream in(text);
    std::string token;
    in >> token;
    while (!token.empty() && (std::ispunct(static_cast<unsigned char>(token.back())) != 0)) {
        token.pop_back();
    }
    return token;
}

bool is_accept(const std::string& verdict) {
    return lower(first_token(verdict)) == "accept";
}

// Manager replies are free text; the first recognizable worker role wins.
std::optional<AgentRole> parse_role_choice(const std::string& text) {
    const auto token = lower(first_token(text));
    if (token == "planner") return AgentRole::planner;
    if (token == "reviewer") return AgentRole::reviewer;
    if (token == "coder") return AgentRole::coder;
    if (token == "executor") return AgentRole::executor;
    return std::nullopt;
}

std::vector<ChatMessage> as_conversation(const AgentTranscript& transcript) {
    std::vector<ChatMessage> conv;
    conv.reserve(transcript.steps.size());
    for (const auto& step : transcript.steps) {
        conv.push_back({step.role, step.message});
    }
    return conv;
}

// Executor turn: run whatever tool calls the latest Coder message requested.
TranscriptStep execute_tools(const AgentTranscript& transcript, const ToolRegistry& tools) {
    TranscriptStep step;
    step.role = AgentRole::executor;

    const TranscriptStep* coder = nullptr;
    for (auto it = transcript.steps.rbegin(); it != transcript.steps.rend(); ++it) {
        if (it->role == AgentRole::coder) {
            coder = &*it;
            break;
        }
    }
    nlohmann::json calls;
    if (coder != nullptr) {
        if (auto block = extract_json_object(coder->message)) {
            auto doc = nlohmann::json::parse(*block, nullptr, false);
            if (doc.is_object() && doc.contains("tool_calls") &&
                doc["tool_calls"].is_array()) {
                calls = doc["tool_calls"];
            }
        }
    }
    if (!calls.is_array() || calls.empty()) {
        step.message = nlohmann::json({{"error", "no tool calls pending"}}).dump();
        return step;
    }

    nlohmann::json results = nlohmann::json::array();
    for (const auto& call : calls) {
        ToolCall tc;
        if (!call.is_object() || !call.contains("tool")) {
            tc.name = "";
            tc.result = {{"error", "malformed tool call"}};
        } else {
            tc.name = call.at("tool").get<std::string>();
            tc.args = call.contains("args") ? call.at("args") : nlohmann::json::object();
            tc.result = tools.dispatch(tc.name, tc.args);
        }
        results.push_back({{"tool", tc.name}, {"result", tc.result}});
        step.tool_calls.push_back(std::move(tc));
    }
    step.message = nlohmann::json({{"results", results}}).dump();
    return step;
}

std::optional<RetrievalPlan> try_parse_plan(const std::string& message) {
    auto block = extract_json_object(message);
    if (!block) {
        return std::nullopt;
    }
    try {
        return plan_from_text(*block);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

std::string role_prompt(AgentRole role, const std::string& query, const CardSet& cards,
                        const std::vector<std::string>& memory) {
    std::ostringstream out;
    out << "User query: " << query << "\n\n" << cards.render() << "\n";
    switch (role) {
    case AgentRole::manager:
        out << "You are the manager. Review the conversation and reply with exactly one "
               "word naming the next agent: planner, reviewer, coder, or executor.";
        break;
    case AgentRole::planner:
        out << "You are the planner. Produce a retrieval plan as a JSON object with "
               "fields: version (1), query, entries (array of {sensor_id, sensor_type, "
               "lat_deg, lon_deg, time_range:{start_s,end_s}, est_payload_bits?}).";
        if (!memory.empty()) {
            out << "\nReviewer notes so far:\n";
            for (const auto& note : memory) {
                out << "- " << note << "\n";
            }
        }
        break;
    case AgentRole::reviewer:
        out << "You are the reviewer. If the latest plan satisfies the query, reply "
               "ACCEPT. Otherwise reply REVISE followed by what must change.";
        break;
    case AgentRole::coder:
        out << "You are the coder. Request data lookups as a JSON object "
               "{\"tool_calls\": [{\"tool\": name, \"args\": {...}}]}.";
        break;
    case AgentRole::executor:
        out << "You are the executor. Tool results are produced locally.";
        break;
    }
    return out.str();
}

AgentTranscript& reflect(AgentTranscript& transcript, const std::string& verdict) {
    transcript.memory.push_back(verdict);
    return transcript;
}

PlanningResult run_planning(const std::string& query, const CardSet& cards,
                            const ToolRegistry& tools, LlmBackend& backend, int step_limit) {
    if (step_limit < 1) {
        throw validation_error("step_limit", "must be at least 1");
    }
    if (cards.sensors.empty()) {
        throw validation_error("cards", "sensor card set is empty");
    }

    AgentTranscript transcript;
    transcript.step_limit = step_limit;

    while (static_cast<int>(transcript.steps.size()) < step_limit) {
        const auto conversation = as_conversation(transcript);

        // Manager consultations are control metadata, not transcript steps.
        const auto choice = backend.next_message(
            AgentRole::manager, role_prompt(AgentRole::manager, query, cards, {}),
            conversation);
        AgentRole role = parse_role_choice(choice).value_or(
            kFallbackOrder[transcript.steps.size() % 5]);

        if (role == AgentRole::executor) {
            transcript.steps.push_back(execute_tools(transcript, tools));
            continue;
        }

        TranscriptStep step;
        step.role = role;
        step.message = backend.next_message(
            role, role_prompt(role, query, cards, transcript.memory), conversation);
        transcript.steps.push_back(std::move(step));

        if (role == AgentRole::reviewer) {
            const auto& verdict = transcript.steps.back().message;
            reflect(transcript, verdict);
            if (is_accept(verdict)) {
                break;
            }
        }
    }

    // The plan is whatever the last Planner or Coder turn produced.
    for (auto it = transcript.steps.rbegin(); it != transcript.steps.rend(); ++it) {
        if (it->role != AgentRole::planner && it->role != AgentRole::coder) {
            continue;
        }
        if (auto plan = try_parse_plan(it->message)) {
            if (plan->query.empty()) {
                plan->query = query;
            }
            return {std::move(*plan), std::move(transcript)};
        }
    }
    throw plan_parse_error("no schema-valid plan produced within " +
                               std::to_string(step_limit) + " steps",
                           std::move(transcript));
}

double plan_accuracy(const RetrievalPlan& predicted, const RetrievalPlan& gold) {
    if (gold.entries.empty()) {
        throw validation_error("gold", "gold plan has no entries");
    }
    std::set<std::string> pred_ids;
    for (const auto& e : predicted.entries) {
        pred_ids.insert(e.sensor_id);
    }
    std::set<std::string> gold_ids;
    for (const auto& e : gold.entries) {
        gold_ids.insert(e.sensor_id);
    }
    std::size_t hits = 0;
    for (const auto& id : pred_ids) {
        hits += gold_ids.count(id);
    }
    const double precision =
        pred_ids.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pred_ids.size());
    const double recall = static_cast<double>(hits) / static_cast<double>(gold_ids.size());
    if (precision + recall == 0.0) {
        return 0.0;
    }
    return 2.0 * precision * recall / (precision + recall);
}

nlohmann::ordered_json transcript_to_json(const AgentTranscript& transcript) {
    nlohmann::ordered_json doc;
    doc["step_limit"] = transcript.step_limit;
    doc["steps"] = nlohmann::ordered_json::array();
    for (const auto& step : transcript.steps) {
        nlohmann::ordered_json s;
        s["role"] = role_name(step.role);
        s["message"] = step.message;
        if (!step.tool_calls.empty()) {
            s["tool_calls"] = nlohmann::ordered_json::array();
            for (const auto& tc : step.tool_calls) {
                s["tool_calls"].push_back(
                    {{"tool", tc.name}, {"args", tc.args}, {"result", tc.result}});
            }
        }
        doc["steps"].push_back(std::move(s));
    }
    doc["memory"] = transcript.memory;
    return doc;
}

} // namespace dtlink
