#include "scribe/runtime/agentic.hpp"

#include "scribe/errors.hpp"
#include "scribe/util.hpp"

namespace scribe::runtime {

std::string extract_code_block(const std::string& response) {
    std::string best;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = response.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t body_start = response.find('\n', open + 3);
        if (body_start == std::string::npos) break;
        body_start++;
        std::size_t close = response.find("```", body_start);
        if (close == std::string::npos) break;
        std::string block = response.substr(body_start, close - body_start);
        if (block.size() > best.size()) best = block;
        pos = close + 3;
    }
    if (best.empty()) return response; // models sometimes skip the fences
    return best;
}

RetryTranscript agentic_generate(const gateway::LlmHandle& generator,
                                 const html::RawHtmlDocument& page,
                                 int n,
                                 const std::vector<ShotExample>& shots,
                                 const std::string& interpreter,
                                 const ExecutionLimits& limits,
                                 const gateway::TemplateStore& templates,
                                 const std::optional<std::string>& prompt_html) {
    if (n < 1) throw std::invalid_argument("agentic_generate requires n >= 1");
    if (!generator) throw Error("generator unavailable");

    nlohmann::json vars = {{"html", prompt_html.value_or(page.html)}};
    if (!shots.empty()) {
        nlohmann::json examples = nlohmann::json::array();
        for (const auto& shot : shots) {
            examples.push_back({{"html_content", shot.html}, {"triples_annotation", shot.triples}});
        }
        vars["examples"] = examples;
    }

    RetryTranscript transcript;
    for (int iter = 0; iter < n; iter++) {
        const std::string prompt = templates.render("script_gen", vars);
        const std::string response = generator(prompt);
        const std::string code = util::trim(extract_code_block(response));

        Attempt attempt;
        attempt.script.id = page.url + "#attempt" + std::to_string(iter + 1);
        attempt.script.source = code;
        attempt.script.interpreter = interpreter;
        attempt.script.created_from = page.url;

        if (code.empty()) {
            attempt.result.status = ExecStatus::Error;
            attempt.result.stderr_tail = "no code block in generator response";
        } else {
            attempt.result = execute_script(attempt.script, page, limits);
        }
        attempt.feedback = "status: " + to_string(attempt.result.status);
        if (attempt.result.status == ExecStatus::Ok) {
            attempt.feedback += ", " + std::to_string(attempt.result.triples.size()) + " triples";
        }
        if (!attempt.result.stderr_tail.empty()) {
            attempt.feedback += "\nstderr:\n" + attempt.result.stderr_tail;
        }

        const bool ok = attempt.result.status == ExecStatus::Ok;
        transcript.attempts.push_back(attempt);
        transcript.final = attempt.script;
        transcript.iterations_used = iter + 1;
        if (ok) break;

        vars["prev_script"] = attempt.script.source;
        vars["feedback"] = attempt.feedback;
    }
    return transcript;
}

} // namespace scribe::runtime
