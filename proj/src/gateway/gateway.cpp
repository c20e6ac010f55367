#include "scribe/gateway/gateway.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"

#include "scribe/errors.hpp"
#include "scribe/util.hpp"

namespace scribe::gateway {

EndpointProfile EndpointProfile::from_json(const std::string& name, const nlohmann::json& j) {
    EndpointProfile p;
    p.name = name;
    for (const auto& [key, value] : j.items()) {
        if (key == "base_url") p.base_url = value.get<std::string>();
        else if (key == "model_name") p.model_name = value.get<std::string>();
        else if (key == "auth_env") p.auth_env = value.get<std::string>();
        else if (key == "max_tokens") p.max_tokens = value.get<int>();
        else if (key == "temperature") p.temperature = value.get<double>();
        else if (key == "timeout_secs") p.timeout = std::chrono::milliseconds(
                     static_cast<long long>(value.get<double>() * 1000.0));
        else if (key == "transport") {
            std::string t = value.get<std::string>();
            if (t == "http") p.transport = Transport::Http;
            else if (t == "mock") p.transport = Transport::Mock;
            else throw ConfigError("unknown transport: " + t);
        }
        else if (key == "mock_script") p.mock_script = value.get<std::string>();
        else if (key == "max_attempts") p.max_attempts = value.get<int>();
        else throw ConfigError("unknown profile key: " + key);
    }
    if (p.transport == Transport::Mock && p.mock_script.empty()) {
        throw ConfigError("mock transport requires mock_script for profile " + name);
    }
    return p;
}

Gateway::Gateway(EndpointProfile profile) : profile_(std::move(profile)) {
    if (profile_.transport == Transport::Mock) {
        for (const auto& row : util::read_jsonl(profile_.mock_script)) {
            MockRule rule;
            rule.match = row.value("match", std::string());
            rule.response = row.at("response").get<std::string>();
            rule.once = row.value("once", false);
            rules_.push_back(std::move(rule));
        }
    }
}

ChatExchange Gateway::complete(const std::string& prompt) {
    const auto start = std::chrono::steady_clock::now();
    ChatExchange ex = profile_.transport == Transport::Mock ? complete_mock(prompt)
                                                            : complete_http(prompt);
    ex.rendered_prompt = prompt;
    ex.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return ex;
}

ChatExchange Gateway::complete_mock(const std::string& prompt) {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& rule : rules_) {
        if (rule.once && rule.used) continue;
        if (prompt.find(rule.match) == std::string::npos) continue;
        rule.used = true;
        ChatExchange ex;
        ex.response_text = rule.response;
        return ex;
    }
    throw EndpointUnavailable("mock transport: no rule matches prompt for profile " + profile_.name);
}

ChatExchange Gateway::complete_http(const std::string& prompt) {
    std::string auth_token;
    if (!profile_.auth_env.empty()) {
        const char* token = std::getenv(profile_.auth_env.c_str());
        if (!token || !*token) {
            throw AuthFailure("auth env var not set: " + profile_.auth_env);
        }
        auth_token = token;
    }

    nlohmann::json body = {
        {"model", profile_.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"max_tokens", profile_.max_tokens},
        {"temperature", profile_.temperature},
    };
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, profile_.max_attempts); attempt++) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100ll << (attempt - 1)));
        }
        httplib::Client client(profile_.base_url);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(profile_.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(profile_.timeout));
        httplib::Headers headers;
        if (!auth_token.empty()) headers.emplace("Authorization", "Bearer " + auth_token);
        auto res = client.Post("/v1/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw AuthFailure("endpoint rejected credentials (status " + std::to_string(res->status) + ")");
        }
        if (res->status >= 500 || res->status == 429) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw EndpointUnavailable("unexpected status " + std::to_string(res->status));
        }
        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices") || parsed["choices"].empty()) {
            throw EndpointUnavailable("malformed completion payload");
        }
        ChatExchange ex;
        ex.response_text = parsed["choices"][0]["message"]["content"].get<std::string>();
        if (parsed.contains("usage")) {
            const auto& usage = parsed["usage"];
            ex.token_usage = {usage.value("prompt_tokens", 0ll), usage.value("completion_tokens", 0ll)};
        }
        return ex;
    }
    throw EndpointUnavailable("endpoint unavailable after retries: " + last_error);
}

LlmHandle Gateway::as_handle() {
    return [this](const std::string& prompt) { return complete(prompt).response_text; };
}

namespace {

// First balanced top-level JSON object in free text.
std::optional<std::string> extract_json_object(const std::string& text) {
    for (std::size_t start = text.find('{'); start != std::string::npos;
         start = text.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < text.size(); i++) {
            char c = text[i];
            if (in_string) {
                if (c == '\\') i++;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') depth++;
            else if (c == '}') {
                if (--depth == 0) return text.substr(start, i - start + 1);
            }
        }
    }
    return std::nullopt;
}

} // namespace

ClassifierVerdict parse_classifier(const std::string& response) {
    auto obj_text = extract_json_object(response);
    if (!obj_text) throw UnparseableVerdict("no JSON object in classifier response");
    nlohmann::json obj = nlohmann::json::parse(*obj_text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("decision")) {
        throw UnparseableVerdict("classifier response lacks a decision field");
    }
    ClassifierVerdict v;
    v.reason = obj.value("reason", std::string());
    std::string decision = util::lower(util::trim(obj["decision"].get<std::string>()));
    if (decision == "yes") v.decision = "Yes";
    else if (decision == "no") v.decision = "No";
    else if (decision == "exclude") v.decision = "Exclude";
    else throw UnparseableVerdict("unrecognized classifier decision: " + decision);
    return v;
}

bool parse_binary(const std::string& response, const std::string& positive,
                  const std::string& negative) {
    const std::string text = util::lower(util::trim(response));
    const std::string pos = util::lower(positive);
    const std::string neg = util::lower(negative);
    // Longer vocabulary word first: "incorrect" must win over its "correct" suffix-free prefix hazard.
    const std::string& first = pos.size() >= neg.size() ? pos : neg;
    const std::string& second = pos.size() >= neg.size() ? neg : pos;
    if (text.rfind(first, 0) == 0) return &first == &pos;
    if (text.rfind(second, 0) == 0) return &second == &pos;
    throw UnparseableVerdict("response matches neither vocabulary word: " + response);
}

} // namespace scribe::gateway
