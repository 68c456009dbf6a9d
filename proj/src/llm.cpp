// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the dtlink authors

#include "dtlink/llm.hpp"

#include <cstdlib>
#include <fstream>

#include "dtlink/errors.hpp"

#include "httplib.h"
#include "json.hpp"

namespace dtlink {

const char* role_name(AgentRole role) {
    switch (role) {
    case AgentRole::manager:
        return "manager";
    case AgentRole::planner:
        return "planner";
    case AgentRole::reviewer:
        return "reviewer";
    case AgentRole::coder:
        return "coder";
    case AgentRole::executor:
        return "executor";
    }
    return "unknown";
}

AgentRole role_from_name(const std::string& name) {
    if (name == "manager") return AgentRole::manager;
    if (name == "planner") return AgentRole::planner;
    if (name == "reviewer") return AgentRole::reviewer;
    if (name == "coder") return AgentRole::coder;
    if (name == "executor") return AgentRole::executor;
    throw parse_error("unknown agent role '" + name + "'");
}

MockBackend MockBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw parse_error("cannot open mock script: " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

MockBackend MockBackend::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("mock script: ") + e.what());
    }
    if (!doc.is_array()) {
        throw parse_error("mock script: expected a JSON array of {role, step, message}");
    }
    MockBackend backend;
    for (const auto& item : doc) {
        const auto role = role_from_name(item.at("role").get<std::string>());
        const int step = item.at("step").get<int>();
        if (step < 1) {
            throw parse_error("mock script: step numbers start at 1");
        }
        backend.add_reply(role, step, item.at("message").get<std::string>());
    }
    return backend;
}

void MockBackend::add_reply(AgentRole role, int step, std::string message) {
    script_[{static_cast<int>(role), step}] = std::move(message);
}

std::string MockBackend::next_message(AgentRole role, const std::string& system_prompt,
                                      const std::vector<ChatMessage>& conversation) {
    requests_.push_back({role, system_prompt, conversation.size()});
    // Manager consultations do not advance the step counter.
    int workers = 0;
    for (const auto& msg : conversation) {
        if (msg.role != AgentRole::manager) {
            ++workers;
        }
    }
    const int step = workers + 1;
    auto it = script_.find({static_cast<int>(role), step});
    return it == script_.end() ? std::string{} : it->second;
}

HttpChatBackend::HttpChatBackend(std::string base_url, std::string api_key, std::string model)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), model_(std::move(model)) {}

HttpChatBackend HttpChatBackend::from_env() {
    const char* url = std::getenv("DTLINK_LLM_URL");
    if (url == nullptr || *url == '\0') {
        throw backend_error("DTLINK_LLM_URL is not set");
    }
    const char* key = std::getenv("DTLINK_LLM_API_KEY");
    const char* model = std::getenv("DTLINK_LLM_MODEL");
    return HttpChatBackend(url, key != nullptr ? key : "",
                           model != nullptr && *model != '\0' ? model : "default");
}

std::string HttpChatBackend::next_message(AgentRole role, const std::string& system_prompt,
                                          const std::vector<ChatMessage>& conversation) {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "system"}, {"content", system_prompt}});
    for (const auto& msg : conversation) {
        // Earlier turns from any agent read as user context tagged by role.
        messages.push_back({{"role", "user"},
                            {"content", std::string("[") + role_name(msg.role) + "] " +
                                            msg.content}});
    }
    messages.push_back(
        {{"role", "user"},
         {"content", std::string("Respond now as the ") + role_name(role) + " agent."}});

    nlohmann::json body = {{"model", model_}, {"messages", messages}};

    httplib::Client client(base_url_);
    client.set_connection_timeout(10);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (!api_key_.empty()) {
        headers.emplace("Authorization", "Bearer " + api_key_);
    }

    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) {
        throw backend_error("chat endpoint unreachable: " + base_url_);
    }
    if (res->status != 200) {
        throw backend_error("chat endpoint returned status " + std::to_string(res->status));
    }
    try {
        auto doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw backend_error(std::string("malformed chat response: ") + e.what());
    }
}

} // namespace dtlink
