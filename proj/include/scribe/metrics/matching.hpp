#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

#include "scribe/metrics/triple.hpp"

namespace scribe::metrics {

std::size_t levenshtein(const std::string& a, const std::string& b);

// Levenshtein-ratio similarity of the canonical joined strings:
// 1 - dist(a, b) / max(|a|, |b|); 1.0 when both joined strings are empty.
double fuzzy_similarity(const Triple& g, const Triple& p);

enum class MatchMethod { Exact, Greedy };

struct MatchedPair {
    std::size_t gold_index;
    std::size_t pred_index;
    double similarity;
};

struct Matching {
    std::vector<MatchedPair> pairs;
    std::size_t gold_size = 0;
    std::size_t pred_size = 0;
    MatchMethod method = MatchMethod::Exact;
    bool extrapolated = false;
    double extrapolated_mass = 0.0;

    double total_similarity() const;
};

// Maximum-total-similarity one-to-one assignment (Jonker-Volgenant style
// shortest augmenting path over the full similarity matrix).
Matching match_exact(const TripleList& gold, const TripleList& pred);

// Greedy descending-similarity matching with a wall-clock deadline. When the
// deadline fires mid-scoring or mid-selection, the remaining capacity is
// projected from the mean similarity of the pairs selected so far.
Matching match_greedy(const TripleList& gold, const TripleList& pred,
                      std::chrono::steady_clock::duration deadline = std::chrono::seconds(60));

// mean(selected similarities) * remaining unmatched capacity.
double extrapolation_mass(double selected_mean, std::size_t remaining_capacity);

} // namespace scribe::metrics
