#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scribe/gateway/gateway.hpp"
#include "scribe/gateway/templates.hpp"
#include "scribe/html/dedup.hpp"
#include "scribe/metrics/triple.hpp"
#include "scribe/runtime/exec.hpp"

namespace scribe::pipeline {

struct PageRecord {
    std::string url;
    std::string html;
    std::optional<std::string> title;
    std::optional<std::string> detected_language;
    bool blacklist_flag = false;
};

struct PageGroup {
    std::string key;
    std::vector<PageRecord> pages;
    std::map<std::string, bool> classified_semi_structured; // url -> Yes?
};

struct PipelineThresholds {
    int n = 30;  // min group size
    int m = 90;  // min semi-structured share, percent
    int k = 13;  // max in-group pages per training example
};

enum class GoldSource { Annotated, Synthetic };

struct TrainingExample {
    PageRecord anchor;
    std::vector<PageRecord> reward_pages; // <= k, includes the anchor
    std::map<std::string, TripleList> synthetic_gold;
    GoldSource source = GoldSource::Synthetic;
};

enum class GroupingMode { UrlPrefix, Domain };

// URL-prefix group key: host (lowercased) plus the path with its final
// segment removed; query/fragment stripped; scheme preserved when present.
// Throws MalformedUrl.
std::string group_key(const std::string& url, GroupingMode mode = GroupingMode::UrlPrefix);

// Pluggable language predicate; built-in heuristic = ASCII-letter ratio plus
// stopword hit rate, applied only when detected_language is absent.
using LanguagePredicate = std::function<bool(const PageRecord&)>;
bool english_heuristic(const PageRecord& page);

std::vector<PageGroup> filter_and_group(const std::vector<PageRecord>& records,
                                        const PipelineThresholds& thresholds,
                                        GroupingMode mode = GroupingMode::UrlPrefix,
                                        const LanguagePredicate& is_english = english_heuristic);

// Classifies every page with the classifier prompt over its deduped HTML.
// "Exclude" pages are removed; a group survives iff the Yes-share among the
// remaining pages is >= m%. Unparseable verdicts count as No.
std::vector<PageGroup> classify_groups(const std::vector<PageGroup>& groups,
                                       const gateway::LlmHandle& classifier,
                                       const PipelineThresholds& thresholds,
                                       const gateway::TemplateStore& templates,
                                       const html::DedupConfig& dedup = {});

// Seeded, byte-reproducible anchor + reward-page sampling (anchor always
// included among the reward pages).
std::vector<TrainingExample> sample_examples(const std::vector<PageGroup>& groups,
                                             const PipelineThresholds& thresholds,
                                             std::uint64_t seed);

// Direct-extraction synthetic gold per reward page. Pages whose response is
// unparseable or empty are dropped; examples whose anchor fails are dropped.
std::vector<TrainingExample> synthesize_gold(const std::vector<TrainingExample>& examples,
                                             const gateway::LlmHandle& extractor,
                                             const gateway::TemplateStore& templates);

// Keeps exactly the examples whose anchor-script run produced no valid
// triples. Throws MissingRun when an example has no run entry.
std::vector<TrainingExample> failure_case_subset(
    const std::vector<TrainingExample>& examples,
    const std::map<std::string, runtime::ExecutionResult>& runs_by_anchor);

} // namespace scribe::pipeline
