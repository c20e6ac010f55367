#include "scribe/io.hpp"

#include <cmath>

namespace scribe::io {

double round_metric(double v) {
    return std::round(v * 1e9) / 1e9;
}

nlohmann::json prf_json(const metrics::PrfScores& s) {
    return {{"p", round_metric(s.precision)}, {"r", round_metric(s.recall)}, {"f1", round_metric(s.f1)}};
}

nlohmann::json score_report_json(const metrics::Matching& m,
                                 const metrics::PrfScores& fuzzy,
                                 const std::optional<metrics::PrfScores>& lm) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& pair : m.pairs) {
        pairs.push_back({pair.gold_index, pair.pred_index, round_metric(pair.similarity)});
    }
    return {
        {"gold_size", m.gold_size},
        {"pred_size", m.pred_size},
        {"fuzzy", prf_json(fuzzy)},
        {"lm", lm ? prf_json(*lm) : nlohmann::json(nullptr)},
        {"matching", pairs},
        {"extrapolated", m.extrapolated},
    };
}

nlohmann::json reward_row_json(const reward::GroupScores& gs, const reward::RewardBreakdown& b) {
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& [url, r] : gs.scores) scores[url] = round_metric(r);
    return {
        {"anchor", gs.anchor_page},
        {"scores", scores},
        {"self", round_metric(b.self_score)},
        {"cross_mean", round_metric(b.cross_mean)},
        {"total", round_metric(b.total)},
        {"formula", b.formula == reward::RewardFormula::Scribes ? "scribes" : "self_only"},
    };
}

namespace {

nlohmann::json macro_json(const metrics::MacroScores& m) {
    return {
        {"mean_p", round_metric(m.mean_p)},
        {"mean_r", round_metric(m.mean_r)},
        {"macro_f1", round_metric(m.macro_f1)},
        {"harmonic_f1", round_metric(m.harmonic)},
    };
}

} // namespace

nlohmann::json eval_report_json(const reward::EvalReport& report) {
    return {
        {"examples", report.examples},
        {"holdout_examples", report.holdout_examples},
        {"all", macro_json(report.all)},
        {"example", macro_json(report.example)},
        {"holdout", report.holdout ? macro_json(*report.holdout) : nlohmann::json(nullptr)},
    };
}

TripleList triples_from_json(const nlohmann::json& rows) {
    TripleList out;
    for (const auto& row : rows) {
        if (row.is_array() && row.size() == 3) {
            out.push_back({row[0].get<std::string>(), row[1].get<std::string>(),
                           row[2].get<std::string>()});
        } else if (row.is_object()) {
            out.push_back({row.value("subject", ""), row.value("predicate", ""),
                           row.value("object", "")});
        }
    }
    return out;
}

nlohmann::json triples_to_json(const TripleList& triples) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : triples) rows.push_back({t.subject, t.predicate, t.object});
    return rows;
}

} // namespace scribe::io
