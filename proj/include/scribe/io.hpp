#pragma once

#include <optional>

#include "json.hpp"

#include "scribe/metrics/matching.hpp"
#include "scribe/metrics/prf.hpp"
#include "scribe/reward/reward.hpp"

namespace scribe::io {

// Rounds report numbers to a fixed precision so serialized reports are
// byte-stable across runs and platforms.
double round_metric(double v);

nlohmann::json prf_json(const metrics::PrfScores& s);

nlohmann::json score_report_json(const metrics::Matching& m,
                                 const metrics::PrfScores& fuzzy,
                                 const std::optional<metrics::PrfScores>& lm);

nlohmann::json reward_row_json(const reward::GroupScores& gs, const reward::RewardBreakdown& b);

nlohmann::json eval_report_json(const reward::EvalReport& report);

TripleList triples_from_json(const nlohmann::json& rows);
nlohmann::json triples_to_json(const TripleList& triples);

} // namespace scribe::io
