#include "scribe/html/tokens.hpp"

#include "scribe/errors.hpp"

namespace scribe::html {

TokenCounterRegistry::TokenCounterRegistry() {
    counters_[kDefaultCounter] = [](const std::string& text) {
        return static_cast<std::int64_t>((text.size() + 3) / 4);
    };
}

void TokenCounterRegistry::register_counter(const std::string& id, TokenCounterFn fn) {
    counters_[id] = std::move(fn);
}

bool TokenCounterRegistry::has(const std::string& id) const {
    return counters_.count(id) > 0;
}

TokenCount TokenCounterRegistry::count(const std::string& text, const std::string& counter_id) const {
    auto it = counters_.find(counter_id);
    if (it == counters_.end()) throw UnknownCounter("unknown token counter: " + counter_id);
    return TokenCount{it->second(text), counter_id};
}

} // namespace scribe::html
