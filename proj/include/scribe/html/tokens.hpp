#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace scribe::html {

struct TokenCount {
    std::int64_t count = 0;
    std::string counter_id;
};

using TokenCounterFn = std::function<std::int64_t(const std::string&)>;

// Registry of token counters. "chars4" (ceil(bytes / 4)) is built in and is
// the default; external tokenizers register under their own id.
class TokenCounterRegistry {
public:
    TokenCounterRegistry();

    void register_counter(const std::string& id, TokenCounterFn fn);
    bool has(const std::string& id) const;

    // Throws UnknownCounter for unregistered ids.
    TokenCount count(const std::string& text, const std::string& counter_id = kDefaultCounter) const;

    static constexpr const char* kDefaultCounter = "chars4";

private:
    std::map<std::string, TokenCounterFn> counters_;
};

} // namespace scribe::html
