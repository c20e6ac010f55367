#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scribe/metrics/prf.hpp"
#include "scribe/metrics/triple.hpp"

namespace scribe::reward {

enum class ScoreMode { Train, Eval };

// Fuzzy F1 between prediction and gold; train mode uses the deadline-bounded
// greedy matcher, eval mode the exact matcher.
double score_pair(const TripleList& pred, const TripleList& gold, ScoreMode mode,
                  std::chrono::steady_clock::duration deadline = std::chrono::seconds(60));

struct GroupScores {
    std::string anchor_page;
    std::map<std::string, double> scores; // page id -> r(p->q)
    std::size_t group_size() const { return scores.size(); }
};

enum class RewardFormula { Scribes, SelfOnly };

struct RewardBreakdown {
    double self_score = 0.0;
    double cross_mean = 0.0; // mean over q != p; 0 for singleton groups
    double total = 0.0;
    RewardFormula formula = RewardFormula::Scribes;
};

// total = (1/|G|) sum_q r(p->q) = self/|G| + ((|G|-1)/|G|) * cross_mean
RewardBreakdown scribes_reward(const GroupScores& gs);

// total = r(p->p)
RewardBreakdown self_only_reward(const GroupScores& gs);

struct EvalSplit {
    double all = 0.0;
    double example = 0.0;
    std::optional<double> holdout; // absent for singleton groups
};

EvalSplit eval_split(const GroupScores& gs);

// Per-example PRF scores per evaluation split, as consumed by benchmark_report.
struct SplitPrf {
    metrics::PrfScores all;
    metrics::PrfScores example;
    std::optional<metrics::PrfScores> holdout;
};

struct EvalReport {
    metrics::MacroScores all;
    metrics::MacroScores example;
    std::optional<metrics::MacroScores> holdout;
    std::size_t examples = 0;
    std::size_t holdout_examples = 0;
};

// Macro averages per split; throws EmptyInput on an empty list.
EvalReport benchmark_report(const std::vector<SplitPrf>& splits);

struct SpeedupEstimate {
    double rho = 0.0;     // dedup tokens / flat tokens per page
    double speedup = 0.0; // k / rho
};

SpeedupEstimate estimate_speedup(int k, double tokens_per_dedup_page, double tokens_per_flat_page);

} // namespace scribe::reward
