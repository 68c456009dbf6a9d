// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors
//
// Multi-agent planning loop. A Manager picks which worker speaks next;
// Planner drafts the retrieval plan, Reviewer accepts or sends it back
// (verdicts accumulate as memory fed to later Planner turns), Coder requests
// tool calls and the Executor runs them against the local registry. The loop
// ends on Reviewer acceptance or when the step budget runs out.

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dtlink/cards.hpp"
#include "dtlink/llm.hpp"
#include "dtlink/plan.hpp"
#include "dtlink/registry.hpp"

#include "json.hpp"

namespace dtlink {

struct ToolCall {
    std::string name;
    nlohmann::json args;
    nlohmann::json result;
};

struct TranscriptStep {
    AgentRole role;
    std::string message;
    std::vector<ToolCall> tool_calls;
};

struct AgentTranscript {
    std::vector<TranscriptStep> steps; // worker turns only; Manager picks are not steps
    int step_limit = 0;
    std::vector<std::string> memory; // Reviewer verdicts, oldest first
};

struct PlanningResult {
    RetrievalPlan plan;
    AgentTranscript transcript;
};

// Raised when the loop ends without any parseable, schema-valid plan in a
// Planner or Coder message. Carries the transcript for diagnostics.
class plan_parse_error : public std::runtime_error {
  public:
    plan_parse_error(const std::string& what, AgentTranscript transcript)
        : std::runtime_error(what), transcript_(std::move(transcript)) {}
    const AgentTranscript& transcript() const { return transcript_; }

  private:
    AgentTranscript transcript_;
};

// Tool functions the Executor may dispatch. Unknown tools produce an
// {"error": ...} result instead of throwing; the loop must stay live.
class ToolRegistry {
  public:
    using ToolFn = std::function<nlohmann::json(const nlohmann::json& args)>;

    void register_tool(const std::string& name, ToolFn fn);
    nlohmann::json dispatch(const std::string& name, const nlohmann::json& args) const;
    std::vector<std::string> names() const;

  private:
    std::map<std::string, ToolFn> tools_;
};

// geocode / find_sensors / sensor_info over the fixture data
ToolRegistry standard_tools(const SensorRegistry& registry, const Gazetteer& gazetteer);

inline constexpr int kDefaultStepLimit = 15;

// Worker order used whenever the Manager's pick cannot be parsed.
extern const AgentRole kFallbackOrder[5];

// System prompt assembled for one agent turn; exposed so tests can assert
// memory inclusion without running a backend.
std::string role_prompt(AgentRole role, const std::string& query, const CardSet& cards,
                        const std::vector<std::string>& memory);

// appends the Reviewer verdict to transcript memory, preserving order
AgentTranscript& reflect(AgentTranscript& transcript, const std::string& verdict);

// throws plan_parse_error on exhaustion without a valid plan; backend_error
// propagates from live backends
PlanningResult run_planning(const std::string& query, const CardSet& cards,
                            const ToolRegistry& tools, LlmBackend& backend,
                            int step_limit = kDefaultStepLimit);

// F1 over the sensor_id sets of predicted vs. gold; throws validation_error
// when gold has no entries
double plan_accuracy(const RetrievalPlan& predicted, const RetrievalPlan& gold);

nlohmann::ordered_json transcript_to_json(const AgentTranscript& transcript);

} // namespace dtlink
