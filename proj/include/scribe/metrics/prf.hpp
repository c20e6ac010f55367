#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scribe/metrics/matching.hpp"
#include "scribe/metrics/triple.hpp"

namespace scribe::metrics {

enum class PrfKind { Fuzzy, Lm };

struct PrfScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    PrfKind kind = PrfKind::Fuzzy;
};

struct JudgeVerdict {
    bool match = false;
    std::string raw_response;
};

// Judges one matched (gold, pred) pair; must be callable from worker threads.
using JudgeHandle = std::function<JudgeVerdict(const Triple&, const Triple&)>;

double f1_of(double p, double r);

PrfScores fuzzy_prf(const Matching& m);

// LM metrics over an exact matching; unparseable verdicts count as 0.
// `workers` bounds concurrent in-flight judge calls.
PrfScores lm_prf(const Matching& m, const TripleList& gold, const TripleList& pred,
                 const JudgeHandle& judge, int workers = 8);

// Harmonic-of-means F1 from mean precision and mean recall.
double harmonic_f1(double mean_p, double mean_r);

struct MacroScores {
    double mean_p = 0.0;
    double mean_r = 0.0;
    double macro_f1 = 0.0;
    double harmonic = 0.0;
};

// Throws EmptyInput on an empty list.
MacroScores macro_aggregate(const std::vector<PrfScores>& per_example);

} // namespace scribe::metrics
