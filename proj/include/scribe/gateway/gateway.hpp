#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace scribe::gateway {

enum class Transport { Http, Mock };

struct EndpointProfile {
    std::string name;
    std::string base_url;
    std::string model_name;
    std::string auth_env;       // env var holding the API key; empty = no auth
    int max_tokens = 1024;
    double temperature = 0.0;
    std::chrono::milliseconds timeout{60'000};
    Transport transport = Transport::Mock;
    std::string mock_script;    // JSONL rules file, required for mock transport
    int max_attempts = 3;       // retries with exponential backoff on transient failures

    static EndpointProfile from_json(const std::string& name, const nlohmann::json& j);
};

struct ChatExchange {
    std::string rendered_prompt;
    std::string response_text;
    std::chrono::milliseconds latency{0};
    std::optional<std::pair<std::int64_t, std::int64_t>> token_usage; // prompt, completion
};

// Plain prompt -> response callable used by modules that only need completion.
using LlmHandle = std::function<std::string(const std::string&)>;

// One configured endpoint. Mock transports replay a JSONL rules file of
// {"match": substring, "response": string[, "once": bool]} applied
// first-match; rules with once=true are consumed after one hit.
class Gateway {
public:
    explicit Gateway(EndpointProfile profile);

    // Throws AuthFailure (before any network call), EndpointUnavailable, Timeout-as-EndpointUnavailable.
    ChatExchange complete(const std::string& prompt);

    LlmHandle as_handle();

    const EndpointProfile& profile() const { return profile_; }

private:
    struct MockRule {
        std::string match;
        std::string response;
        bool once = false;
        bool used = false;
    };

    ChatExchange complete_mock(const std::string& prompt);
    ChatExchange complete_http(const std::string& prompt);

    EndpointProfile profile_;
    std::vector<MockRule> rules_;
    std::mutex mu_;
};

struct ClassifierVerdict {
    std::string reason;
    std::string decision; // "Yes" | "No" | "Exclude"
};

// Extracts the first JSON object from the response (prose wrapping allowed)
// and normalizes the decision. Throws UnparseableVerdict.
ClassifierVerdict parse_classifier(const std::string& response);

// Case-insensitive prefix match after trimming; when one vocabulary word is a
// prefix of the other (correct/incorrect), the longer one is tested first.
// Throws UnparseableVerdict.
bool parse_binary(const std::string& response, const std::string& positive,
                  const std::string& negative);

} // namespace scribe::gateway
