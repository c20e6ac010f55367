#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scribe/gateway/gateway.hpp"
#include "scribe/gateway/templates.hpp"
#include "scribe/runtime/exec.hpp"

namespace scribe::runtime {

struct ShotExample {
    std::string html;
    std::string triples; // rendered annotation text shown in the prompt
};

struct Attempt {
    ExtractionScript script;
    ExecutionResult result;
    std::string feedback; // status + stderr tail fed back on retry
};

struct RetryTranscript {
    std::vector<Attempt> attempts;
    ExtractionScript final;
    int iterations_used = 0;
};

// Longest fenced code block; the whole response when no fence is present.
std::string extract_code_block(const std::string& response);

// agentic-n-iter loop: render the script-generation prompt (optionally with
// shots), execute the returned script, and on any non-ok status re-prompt
// with the previous script plus execution feedback, up to n attempts total.
// `prompt_html` overrides the HTML shown to the model (e.g. the deduped
// form) while execution still runs against the raw page.
RetryTranscript agentic_generate(const gateway::LlmHandle& generator,
                                 const html::RawHtmlDocument& page,
                                 int n,
                                 const std::vector<ShotExample>& shots,
                                 const std::string& interpreter,
                                 const ExecutionLimits& limits,
                                 const gateway::TemplateStore& templates,
                                 const std::optional<std::string>& prompt_html = std::nullopt);

} // namespace scribe::runtime
