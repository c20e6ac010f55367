#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scribe/gateway/gateway.hpp"
#include "scribe/gateway/templates.hpp"
#include "scribe/html/dom.hpp"
#include "scribe/metrics/triple.hpp"

namespace scribe::qa {

enum class ReferenceMode { FlattenOnly, FlattenPlusPredicted, FlattenPlusGold };

struct QaItem {
    std::string question;
    std::string gold_answer;
    std::string page_url;
    ReferenceMode reference_mode = ReferenceMode::FlattenOnly;
};

enum class Verdict { Correct, Incorrect, Unjudged };

struct QaResult {
    std::string answer;
    Verdict verdict = Verdict::Unjudged;
    std::string judged_by;
};

// Flattened page text, plus (in augmented modes) a delimited triples section,
// one "subject | predicate | object" line per triple.
// Throws MissingTriples when an augmented mode gets no triple list.
std::string build_reference(const QaItem& item, const html::RawHtmlDocument& page,
                            const std::optional<TripleList>& triples);

struct QaRun {
    double accuracy = 0.0; // correct / judged
    std::size_t judged = 0;
    std::size_t unjudged = 0;
    std::vector<QaResult> results;
};

QaRun run_qa(const std::vector<QaItem>& items,
             const std::vector<std::string>& references, // one per item, pre-built
             const gateway::LlmHandle& backbone,
             const gateway::LlmHandle& judge,
             const gateway::TemplateStore& templates,
             const std::string& judge_profile_name = "judge");

} // namespace scribe::qa
