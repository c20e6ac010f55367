#include "scribe/reward/reward.hpp"

#include <stdexcept>

#include "scribe/errors.hpp"
#include "scribe/metrics/matching.hpp"

namespace scribe::reward {

double score_pair(const TripleList& pred, const TripleList& gold, ScoreMode mode,
                  std::chrono::steady_clock::duration deadline) {
    metrics::Matching m = (mode == ScoreMode::Train) ? metrics::match_greedy(gold, pred, deadline)
                                                     : metrics::match_exact(gold, pred);
    return metrics::fuzzy_prf(m).f1;
}

namespace {

void require_valid(const GroupScores& gs) {
    if (gs.scores.empty() || !gs.scores.count(gs.anchor_page)) {
        throw std::invalid_argument("GroupScores must contain the anchor page");
    }
}

} // namespace

RewardBreakdown scribes_reward(const GroupScores& gs) {
    require_valid(gs);
    RewardBreakdown b;
    b.formula = RewardFormula::Scribes;
    b.self_score = gs.scores.at(gs.anchor_page);
    double sum = 0.0;
    double cross_sum = 0.0;
    for (const auto& [page, r] : gs.scores) {
        sum += r;
        if (page != gs.anchor_page) cross_sum += r;
    }
    const double n = static_cast<double>(gs.group_size());
    b.cross_mean = gs.group_size() > 1 ? cross_sum / (n - 1.0) : 0.0;
    b.total = sum / n;
    return b;
}

RewardBreakdown self_only_reward(const GroupScores& gs) {
    require_valid(gs);
    RewardBreakdown b = scribes_reward(gs);
    b.formula = RewardFormula::SelfOnly;
    b.total = b.self_score;
    return b;
}

EvalSplit eval_split(const GroupScores& gs) {
    require_valid(gs);
    EvalSplit s;
    s.example = gs.scores.at(gs.anchor_page);
    double sum = 0.0;
    double cross_sum = 0.0;
    for (const auto& [page, r] : gs.scores) {
        sum += r;
        if (page != gs.anchor_page) cross_sum += r;
    }
    const double n = static_cast<double>(gs.group_size());
    s.all = sum / n;
    if (gs.group_size() > 1) s.holdout = cross_sum / (n - 1.0);
    return s;
}

EvalReport benchmark_report(const std::vector<SplitPrf>& splits) {
    if (splits.empty()) throw EmptyInput("benchmark_report on empty list");
    std::vector<metrics::PrfScores> all, example, holdout;
    for (const auto& s : splits) {
        all.push_back(s.all);
        example.push_back(s.example);
        if (s.holdout) holdout.push_back(*s.holdout);
    }
    EvalReport r;
    r.examples = splits.size();
    r.holdout_examples = holdout.size();
    r.all = metrics::macro_aggregate(all);
    r.example = metrics::macro_aggregate(example);
    if (!holdout.empty()) r.holdout = metrics::macro_aggregate(holdout);
    return r;
}

SpeedupEstimate estimate_speedup(int k, double tokens_per_dedup_page, double tokens_per_flat_page) {
    if (k < 1) throw std::domain_error("k must be >= 1");
    if (tokens_per_flat_page <= 0.0 || tokens_per_dedup_page <= 0.0) {
        throw std::domain_error("token counts must be positive");
    }
    SpeedupEstimate e;
    e.rho = tokens_per_dedup_page / tokens_per_flat_page;
    e.speedup = static_cast<double>(k) / e.rho;
    return e;
}

} // namespace scribe::reward
