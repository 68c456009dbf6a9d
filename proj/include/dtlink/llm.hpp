// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dtlink {

enum class AgentRole : std::uint8_t { manager, planner, reviewer, coder, executor };

const char* role_name(AgentRole role);
AgentRole role_from_name(const std::string& name); // throws parse_error on unknown name

struct ChatMessage {
    AgentRole role;
    std::string content;
};

// One model call. Implementations must be stateless between calls; any
// memory the orchestrator wants carried forward arrives in the prompt.
class LlmBackend {
  public:
    virtual ~LlmBackend() = default;
    virtual std::string next_message(AgentRole role, const std::string& system_prompt,
                                     const std::vector<ChatMessage>& conversation) = 0;
    virtual std::string name() const = 0;
};

struct BackendRequest {
    AgentRole role;
    std::string system_prompt;
    std::size_t conversation_len = 0;
};

// Deterministic scripted backend. The script is a JSON array of
// {"role": ..., "step": ..., "message": ...}; step counts worker messages,
// so the reply for (role, step) is served when the conversation already
// holds step-1 worker messages. Missing entries yield "" and the caller's
// fallback logic takes over.
class MockBackend : public LlmBackend {
  public:
    MockBackend() = default;
    static MockBackend from_file(const std::filesystem::path& path);
    static MockBackend from_json_text(const std::string& text);

    void add_reply(AgentRole role, int step, std::string message);

    std::string next_message(AgentRole role, const std::string& system_prompt,
                             const std::vector<ChatMessage>& conversation) override;
    std::string name() const override { return "mock"; }

    const std::vector<BackendRequest>& requests() const { return requests_; }

  private:
    std::map<std::pair<int, int>, std::string> script_; // (role, step) -> message
    std::vector<BackendRequest> requests_;
};

// OpenAI-style chat-completion client. Endpoint and credentials come from
// DTLINK_LLM_URL, DTLINK_LLM_API_KEY and DTLINK_LLM_MODEL. Throws
// backend_error when the endpoint is unreachable or replies malformed.
class HttpChatBackend : public LlmBackend {
  public:
    HttpChatBackend(std::string base_url, std::string api_key, std::string model);
    static HttpChatBackend from_env();

    std::string next_message(AgentRole role, const std::string& system_prompt,
                             const std::vector<ChatMessage>& conversation) override;
    std::string name() const override { return "http"; }

  private:
    std::string base_url_;
    std::string api_key_;
    std::string model_;
};

} // namespace dtlink
