#include "scribe/metrics/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scribe {

std::string joined(const Triple& t) {
    return t.subject + " | " + t.predicate + " | " + t.object;
}

} // namespace scribe

namespace scribe::metrics {

std::size_t levenshtein(const std::string& a, const std::string& b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); i++) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); j++) {
            std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double fuzzy_similarity(const Triple& g, const Triple& p) {
    const std::string a = joined(g);
    const std::string b = joined(p);
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

double Matching::total_similarity() const {
    double total = extrapolated_mass;
    for (const auto& pair : pairs) total += pair.similarity;
    return total;
}

namespace {

// Rectangular min-cost assignment via shortest augmenting paths with dual
// potentials (Jonker-Volgenant). Requires nr <= nc; fills col4row[row] = col.
void solve_rectangular_assignment(std::size_t nr, std::size_t nc,
                                  const std::vector<double>& cost,
                                  std::vector<std::ptrdiff_t>& col4row) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(nr, 0.0), v(nc, 0.0), shortest(nc);
    std::vector<std::ptrdiff_t> path(nc, -1), row4col(nc, -1), remaining(nc);
    std::vector<bool> sr(nr), sc(nc);
    col4row.assign(nr, -1);

    for (std::size_t cur_row = 0; cur_row < nr; cur_row++) {
        double min_val = 0.0;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(cur_row);
        std::size_t num_remaining = nc;
        for (std::size_t it = 0; it < nc; it++) {
            remaining[it] = static_cast<std::ptrdiff_t>(nc - it - 1);
        }
        std::fill(sr.begin(), sr.end(), false);
        std::fill(sc.begin(), sc.end(), false);
        std::fill(shortest.begin(), shortest.end(), kInf);

        std::ptrdiff_t sink = -1;
        while (sink == -1) {
            std::ptrdiff_t index = -1;
            double lowest = kInf;
            sr[static_cast<std::size_t>(i)] = true;
            for (std::size_t it = 0; it < num_remaining; it++) {
                std::ptrdiff_t j = remaining[it];
                double r = min_val + cost[static_cast<std::size_t>(i) * nc + static_cast<std::size_t>(j)]
                           - u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
                if (r < shortest[static_cast<std::size_t>(j)]) {
                    path[static_cast<std::size_t>(j)] = i;
                    shortest[static_cast<std::size_t>(j)] = r;
                }
                if (shortest[static_cast<std::size_t>(j)] < lowest ||
                    (shortest[static_cast<std::size_t>(j)] == lowest && row4col[static_cast<std::size_t>(j)] == -1)) {
                    lowest = shortest[static_cast<std::size_t>(j)];
                    index = static_cast<std::ptrdiff_t>(it);
                }
            }
            min_val = lowest;
            std::ptrdiff_t j = remaining[static_cast<std::size_t>(index)];
            if (row4col[static_cast<std::size_t>(j)] == -1) {
                sink = j;
            } else {
                i = row4col[static_cast<std::size_t>(j)];
            }
            sc[static_cast<std::size_t>(j)] = true;
            remaining[static_cast<std::size_t>(index)] = remaining[--num_remaining];
        }

        u[cur_row] += min_val;
        for (std::size_t ii = 0; ii < nr; ii++) {
            if (sr[ii] && ii != cur_row) {
                u[ii] += min_val - shortest[static_cast<std::size_t>(col4row[ii])];
            }
        }
        for (std::size_t j = 0; j < nc; j++) {
            if (sc[j]) v[j] -= min_val - shortest[j];
        }

        std::ptrdiff_t j = sink;
        while (true) {
            std::ptrdiff_t ii = path[static_cast<std::size_t>(j)];
            row4col[static_cast<std::size_t>(j)] = ii;
            std::swap(col4row[static_cast<std::size_t>(ii)], j);
            if (ii == static_cast<std::ptrdiff_t>(cur_row)) break;
        }
    }
}

} // namespace

Matching match_exact(const TripleList& gold, const TripleList& pred) {
    Matching m;
    m.gold_size = gold.size();
    m.pred_size = pred.size();
    m.method = MatchMethod::Exact;
    if (gold.empty() || pred.empty()) return m;

    const bool transposed = gold.size() > pred.size();
    const std::size_t nr = transposed ? pred.size() : gold.size();
    const std::size_t nc = transposed ? gold.size() : pred.size();
    std::vector<double> cost(nr * nc);
    std::vector<double> sim(gold.size() * pred.size());
    for (std::size_t gi = 0; gi < gold.size(); gi++) {
        for (std::size_t pi = 0; pi < pred.size(); pi++) {
            double s = fuzzy_similarity(gold[gi], pred[pi]);
            sim[gi * pred.size() + pi] = s;
            std::size_t r = transposed ? pi : gi;
            std::size_t c = transposed ? gi : pi;
            cost[r * nc + c] = -s;
        }
    }
    std::vector<std::ptrdiff_t> col4row;
    solve_rectangular_assignment(nr, nc, cost, col4row);

    for (std::size_t r = 0; r < nr; r++) {
        std::size_t c = static_cast<std::size_t>(col4row[r]);
        std::size_t gi = transposed ? c : r;
        std::size_t pi = transposed ? r : c;
        m.pairs.push_back({gi, pi, sim[gi * pred.size() + pi]});
    }
    std::sort(m.pairs.begin(), m.pairs.end(), [](const MatchedPair& a, const MatchedPair& b) {
        return std::tie(a.gold_index, a.pred_index) < std::tie(b.gold_index, b.pred_index);
    });
    return m;
}

double extrapolation_mass(double selected_mean, std::size_t remaining_capacity) {
    return selected_mean * static_cast<double>(remaining_capacity);
}

Matching match_greedy(const TripleList& gold, const TripleList& pred,
                      std::chrono::steady_clock::duration deadline) {
    Matching m;
    m.gold_size = gold.size();
    m.pred_size = pred.size();
    m.method = MatchMethod::Greedy;
    if (gold.empty() || pred.empty()) return m;

    const auto cutoff = std::chrono::steady_clock::now() + deadline;
    auto expired = [&] { return std::chrono::steady_clock::now() >= cutoff; };

    struct Candidate {
        double similarity;
        std::size_t gold_index;
        std::size_t pred_index;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(gold.size() * pred.size());

    bool timed_out = false;
    std::size_t iterations = 0;
    for (std::size_t gi = 0; gi < gold.size() && !timed_out; gi++) {
        for (std::size_t pi = 0; pi < pred.size(); pi++) {
            candidates.push_back({fuzzy_similarity(gold[gi], pred[pi]), gi, pi});
            if ((++iterations & 0x3FF) == 0 && expired()) {
                timed_out = true;
                break;
            }
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return std::tie(a.gold_index, a.pred_index) < std::tie(b.gold_index, b.pred_index);
    });

    std::vector<bool> gold_used(gold.size(), false), pred_used(pred.size(), false);
    const std::size_t capacity = std::min(gold.size(), pred.size());
    iterations = 0;
    for (const auto& c : candidates) {
        if (m.pairs.size() == capacity) break;
        if (!timed_out && (++iterations & 0x3FF) == 0 && expired()) {
            timed_out = true;
            break;
        }
        if (gold_used[c.gold_index] || pred_used[c.pred_index]) continue;
        gold_used[c.gold_index] = true;
        pred_used[c.pred_index] = true;
        m.pairs.push_back({c.gold_index, c.pred_index, c.similarity});
    }

    if (timed_out) {
        m.extrapolated = true;
        double mean = 0.0;
        if (!m.pairs.empty()) {
            for (const auto& p : m.pairs) mean += p.similarity;
            mean /= static_cast<double>(m.pairs.size());
        }
        m.extrapolated_mass = extrapolation_mass(mean, capacity - m.pairs.size());
    }
    std::sort(m.pairs.begin(), m.pairs.end(), [](const MatchedPair& a, const MatchedPair& b) {
        return std::tie(a.gold_index, a.pred_index) < std::tie(b.gold_index, b.pred_index);
    });
    return m;
}

} // namespace scribe::metrics
