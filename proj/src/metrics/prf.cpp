#include "scribe/metrics/prf.hpp"

#include <atomic>
#include <stdexcept>

#include "scribe/errors.hpp"
#include "scribe/util.hpp"

namespace scribe::metrics {

double f1_of(double p, double r) {
    if (p + r <= 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

PrfScores fuzzy_prf(const Matching& m) {
    PrfScores s;
    s.kind = PrfKind::Fuzzy;
    const double mass = m.total_similarity();
    s.precision = m.pred_size == 0 ? 0.0 : mass / static_cast<double>(m.pred_size);
    s.recall = m.gold_size == 0 ? 0.0 : mass / static_cast<double>(m.gold_size);
    s.f1 = f1_of(s.precision, s.recall);
    return s;
}

PrfScores lm_prf(const Matching& m, const TripleList& gold, const TripleList& pred,
                 const JudgeHandle& judge, int workers) {
    if (m.method != MatchMethod::Exact) {
        throw std::invalid_argument("lm_prf requires an exact matching");
    }
    if (m.extrapolated || m.extrapolated_mass != 0.0) {
        throw std::invalid_argument("lm_prf cannot consume extrapolated matchings");
    }
    if (!judge) throw JudgeUnavailable("no judge configured");

    std::vector<int> verdicts(m.pairs.size(), 0);
    util::parallel_for(m.pairs.size(), workers, [&](std::size_t i) {
        const auto& pair = m.pairs[i];
        try {
            JudgeVerdict v = judge(gold[pair.gold_index], pred[pair.pred_index]);
            verdicts[i] = v.match ? 1 : 0;
        } catch (const UnparseableVerdict&) {
            verdicts[i] = 0; // counted as a failed match
        }
    });

    double matched = 0.0;
    for (int v : verdicts) matched += v;

    PrfScores s;
    s.kind = PrfKind::Lm;
    s.precision = m.pred_size == 0 ? 0.0 : matched / static_cast<double>(m.pred_size);
    s.recall = m.gold_size == 0 ? 0.0 : matched / static_cast<double>(m.gold_size);
    s.f1 = f1_of(s.precision, s.recall);
    return s;
}

double harmonic_f1(double mean_p, double mean_r) {
    return f1_of(mean_p, mean_r);
}

MacroScores macro_aggregate(const std::vector<PrfScores>& per_example) {
    if (per_example.empty()) throw EmptyInput("macro_aggregate on empty list");
    MacroScores out;
    for (const auto& s : per_example) {
        out.mean_p += s.precision;
        out.mean_r += s.recall;
        out.macro_f1 += s.f1;
    }
    const double n = static_cast<double>(per_example.size());
    out.mean_p /= n;
    out.mean_r /= n;
    out.macro_f1 /= n;
    out.harmonic = harmonic_f1(out.mean_p, out.mean_r);
    return out;
}

} // namespace scribe::metrics
