#include "scribe/qa/qa.hpp"

#include "scribe/errors.hpp"
#include "scribe/html/dedup.hpp"

namespace scribe::qa {

std::string build_reference(const QaItem& item, const html::RawHtmlDocument& page,
                            const std::optional<TripleList>& triples) {
    std::string reference = html::flatten_html(page);
    if (item.reference_mode == ReferenceMode::FlattenOnly) return reference;
    if (!triples) throw MissingTriples("augmented reference mode requires triples for " + item.page_url);
    reference += "\n\n### Extracted triples\n";
    for (const auto& t : *triples) {
        reference += t.subject + " | " + t.predicate + " | " + t.object + "\n";
    }
    return reference;
}

QaRun run_qa(const std::vector<QaItem>& items,
             const std::vector<std::string>& references,
             const gateway::LlmHandle& backbone,
             const gateway::LlmHandle& judge,
             const gateway::TemplateStore& templates,
             const std::string& judge_profile_name) {
    if (items.size() != references.size()) {
        throw std::invalid_argument("one reference per QA item required");
    }
    QaRun run;
    run.results.resize(items.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < items.size(); i++) {
        QaResult& result = run.results[i];
        try {
            const std::string answer_prompt = templates.render(
                "qa", {{"question", items[i].question}, {"reference", references[i]}});
            result.answer = backbone(answer_prompt);
            const std::string judge_prompt = templates.render(
                "qa_eval", {{"question", items[i].question},
                            {"gold", items[i].gold_answer},
                            {"answer", result.answer}});
            const bool ok = gateway::parse_binary(judge(judge_prompt), "correct", "incorrect");
            result.verdict = ok ? Verdict::Correct : Verdict::Incorrect;
            result.judged_by = judge_profile_name;
            run.judged++;
            if (ok) correct++;
        } catch (const Error&) {
            result.verdict = Verdict::Unjudged;
            run.unjudged++;
        }
    }
    run.accuracy = run.judged == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(run.judged);
    return run;
}

} // namespace scribe::qa
