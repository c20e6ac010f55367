#include "scribe/pipeline/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <set>

#include "scribe/errors.hpp"
#include "scribe/gateway/literal.hpp"
#include "scribe/util.hpp"

namespace scribe::pipeline {

namespace {

struct SplitUrl {
    std::string scheme; // empty when absent
    std::string host;   // lowercased
    std::string path;   // leading '/', no query/fragment; may be empty
};

SplitUrl split_url(const std::string& url) {
    std::string rest = url;
    SplitUrl out;
    std::size_t scheme_end = rest.find("://");
    if (scheme_end != std::string::npos) {
        out.scheme = util::lower(rest.substr(0, scheme_end));
        rest = rest.substr(scheme_end + 3);
    }
    std::size_t cut = rest.find_first_of("?#");
    if (cut != std::string::npos) rest = rest.substr(0, cut);
    std::size_t slash = rest.find('/');
    if (slash == std::string::npos) {
        out.host = util::lower(rest);
    } else {
        out.host = util::lower(rest.substr(0, slash));
        out.path = rest.substr(slash);
    }
    if (out.host.empty()) throw MalformedUrl("no host in url: " + url);
    return out;
}

// Built-in default example snippets for the classifier prompt's few-shot
// slots; deployments can override them via template variables.
const char* kClassifierExample1 =
    "<table><tr><th>Name</th><th>Founded</th></tr><tr><td>Acme</td><td>1990</td></tr></table>";
const char* kClassifierExample2 =
    "<div><p>Q: How do I reset my password?</p><p>A: Use the account settings page.</p></div>";
const char* kClassifierExample3 =
    "<div class=\"infobox\"><dl><dt>Population</dt><dd>52,300</dd><dt>Area</dt><dd>13 km2</dd></dl></div>";

// Portable bounded draw; uniform_int_distribution is not byte-stable across
// standard library implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

} // namespace

std::string group_key(const std::string& url, GroupingMode mode) {
    SplitUrl parts = split_url(url);
    const std::string prefix = parts.scheme.empty() ? parts.host : parts.scheme + "://" + parts.host;
    if (mode == GroupingMode::Domain) return prefix;
    std::string path = parts.path;
    while (!path.empty() && path.back() == '/') path.pop_back();
    std::size_t last = path.rfind('/');
    if (last == std::string::npos || last == 0) return prefix;
    return prefix + path.substr(0, last);
}

bool english_heuristic(const PageRecord& page) {
    if (page.detected_language) {
        std::string lang = util::lower(*page.detected_language);
        return lang == "en" || lang.rfind("en-", 0) == 0 || lang == "english";
    }
    // ASCII-letter ratio plus stopword hit rate over the raw bytes.
    std::size_t letters = 0;
    std::size_t non_ascii = 0;
    for (unsigned char c : page.html) {
        if (std::isalpha(c)) letters++;
        if (c >= 0x80) non_ascii++;
    }
    if (page.html.empty()) return false;
    const double ascii_ratio =
        1.0 - static_cast<double>(non_ascii) / static_cast<double>(page.html.size());
    if (ascii_ratio < 0.9) return false;
    static const char* stopwords[] = {" the ", " and ", " of ", " to ", " in ", " is ", " for "};
    std::string lowered = util::lower(page.html);
    int hits = 0;
    for (const char* w : stopwords) {
        if (lowered.find(w) != std::string::npos) hits++;
    }
    return hits >= 2 || letters < 40; // tiny pages get the benefit of the doubt
}

std::vector<PageGroup> filter_and_group(const std::vector<PageRecord>& records,
                                        const PipelineThresholds& thresholds,
                                        GroupingMode mode,
                                        const LanguagePredicate& is_english) {
    std::map<std::string, PageGroup> by_key;
    std::set<std::string> seen_urls;
    for (const auto& record : records) {
        if (record.blacklist_flag) continue;
        if (!is_english(record)) continue;
        std::string key;
        try {
            key = group_key(record.url, mode);
        } catch (const MalformedUrl&) {
            continue; // bad records skipped
        }
        if (!seen_urls.insert(record.url).second) continue;
        PageGroup& group = by_key[key];
        group.key = key;
        group.pages.push_back(record);
    }
    std::vector<PageGroup> out;
    for (auto& [key, group] : by_key) {
        if (static_cast<int>(group.pages.size()) >= thresholds.n) out.push_back(std::move(group));
    }
    return out;
}

std::vector<PageGroup> classify_groups(const std::vector<PageGroup>& groups,
                                       const gateway::LlmHandle& classifier,
                                       const PipelineThresholds& thresholds,
                                       const gateway::TemplateStore& templates,
                                       const html::DedupConfig& dedup) {
    if (!classifier) throw Error("classifier unavailable");
    std::vector<PageGroup> out;
    for (const auto& group : groups) {
        PageGroup kept;
        kept.key = group.key;
        int yes = 0;
        for (const auto& page : group.pages) {
            nlohmann::json vars = {
                {"html", html::dedup_html({page.url, page.html, page.title}, dedup)},
                {"html_example_1", kClassifierExample1},
                {"html_example_2", kClassifierExample2},
                {"html_example_3", kClassifierExample3},
            };
            std::string decision = "No";
            try {
                decision = gateway::parse_classifier(classifier(templates.render("classifier", vars))).decision;
            } catch (const UnparseableVerdict&) {
                decision = "No"; // logged via counter below
            }
            if (decision == "Exclude") continue;
            if (decision == "Yes") yes++;
            kept.pages.push_back(page);
            kept.classified_semi_structured[page.url] = decision == "Yes";
        }
        if (kept.pages.empty()) continue;
        const double share = 100.0 * static_cast<double>(yes) / static_cast<double>(kept.pages.size());
        if (share >= static_cast<double>(thresholds.m)) out.push_back(std::move(kept));
    }
    return out;
}

std::vector<TrainingExample> sample_examples(const std::vector<PageGroup>& groups,
                                             const PipelineThresholds& thresholds,
                                             std::uint64_t seed) {
    // Deterministic group order; one RNG stream for the whole pass.
    std::vector<const PageGroup*> ordered;
    for (const auto& g : groups) ordered.push_back(&g);
    std::sort(ordered.begin(), ordered.end(),
              [](const PageGroup* a, const PageGroup* b) { return a->key < b->key; });

    std::mt19937_64 rng(seed);
    std::vector<TrainingExample> out;
    for (const PageGroup* group : ordered) {
        if (group->pages.empty()) continue;
        TrainingExample example;
        const std::size_t anchor_index = bounded(rng, group->pages.size());
        example.anchor = group->pages[anchor_index];
        example.source = GoldSource::Synthetic;

        // Anchor plus up to k-1 distinct others, sampled without replacement.
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < group->pages.size(); i++) {
            if (i != anchor_index) others.push_back(i);
        }
        example.reward_pages.push_back(example.anchor);
        const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(thresholds.k) - 1,
                                                       others.size());
        for (std::size_t taken = 0; taken < want; taken++) {
            const std::size_t pick = bounded(rng, others.size());
            example.reward_pages.push_back(group->pages[others[pick]]);
            others.erase(others.begin() + static_cast<std::ptrdiff_t>(pick));
        }
        out.push_back(std::move(example));
    }
    return out;
}

std::vector<TrainingExample> synthesize_gold(const std::vector<TrainingExample>& examples,
                                             const gateway::LlmHandle& extractor,
                                             const gateway::TemplateStore& templates) {
    if (!extractor) throw Error("extractor unavailable");
    std::vector<TrainingExample> out;
    for (const auto& example : examples) {
        TrainingExample enriched;
        enriched.anchor = example.anchor;
        enriched.source = GoldSource::Synthetic;
        bool anchor_ok = false;
        for (const auto& page : example.reward_pages) {
            nlohmann::json vars = {
                {"html", html::flatten_html({page.url, page.html, page.title})},
                {"html_title", page.title.value_or(std::string())},
            };
            TripleList triples;
            try {
                triples = gateway::parse_triples_literal(extractor(templates.render("direct_extract", vars)));
            } catch (const NoLiteralFound&) {
                triples.clear();
            }
            if (triples.empty()) {
                if (page.url == example.anchor.url) break; // anchor failed: drop example
                continue;                                  // page dropped
            }
            enriched.reward_pages.push_back(page);
            enriched.synthetic_gold[page.url] = std::move(triples);
            if (page.url == example.anchor.url) anchor_ok = true;
        }
        if (anchor_ok) out.push_back(std::move(enriched));
    }
    return out;
}

std::vector<TrainingExample> failure_case_subset(
    const std::vector<TrainingExample>& examples,
    const std::map<std::string, runtime::ExecutionResult>& runs_by_anchor) {
    std::vector<TrainingExample> out;
    for (const auto& example : examples) {
        auto it = runs_by_anchor.find(example.anchor.url);
        if (it == runs_by_anchor.end()) {
            throw MissingRun("no run recorded for anchor " + example.anchor.url);
        }
        if (it->second.status != runtime::ExecStatus::Ok) out.push_back(example);
    }
    return out;
}

} // namespace scribe::pipeline
