#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "toolalign/util.hpp"

namespace toolalign {

/// Levenshtein distance over unicode scalar values: the minimum number of
/// single-character insertions, deletions, and substitutions transforming
/// `a` into `b`.
inline int edit_distance(std::string_view a, std::string_view b) {
    std::vector<char32_t> ua = decode_utf8(a);
    std::vector<char32_t> ub = decode_utf8(b);
    const size_t m = ua.size(), n = ub.size();
    if (m == 0) return static_cast<int>(n);
    if (n == 0) return static_cast<int>(m);

    std::vector<int> prev(n + 1), cur(n + 1);
    for (size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
    for (size_t i = 1; i <= m; ++i) {
        cur[0] = static_cast<int>(i);
        for (size_t j = 1; j <= n; ++j) {
            int sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

struct Threshold {
    double tau = 0.0;
    int max_length = 0;
};

/// Length-adaptive similarity threshold: tau = alpha * max character length
/// over the candidates. Kept as a real with no rounding; downstream
/// comparisons use d <= tau. The greedy reference never enters max_length.
inline Threshold compute_threshold(const std::vector<std::string>& candidates, double alpha) {
    if (candidates.empty())
        throw std::invalid_argument("compute_threshold: empty candidate list");
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("compute_threshold: alpha must be in [0, 1]");
    int lmax = 0;
    for (const auto& c : candidates)
        lmax = std::max(lmax, static_cast<int>(char_length(c)));
    return {alpha * lmax, lmax};
}

/// Peakedness of each candidate: the number of *other* candidates within
/// edit distance tau. Duplicates each count (multiset semantics), which is
/// exactly the frequency signal the score exploits.
inline std::vector<int> peakedness_scores(const std::vector<std::string>& candidates, double tau) {
    if (tau < 0.0) throw std::invalid_argument("peakedness_scores: tau must be >= 0");
    const size_t n = candidates.size();
    std::vector<int> phi(n, 0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (edit_distance(candidates[i], candidates[j]) <= tau) {
                ++phi[i];
                ++phi[j];
            }
        }
    }
    return phi;
}

/// Full audit trail of one selection: threshold, per-candidate scores, the
/// argmax set, the chosen representative, and which tie-breaks fired.
struct PeakednessReport {
    double threshold = 0.0;
    int max_length = 0;
    std::vector<int> scores;
    std::vector<size_t> argmax_set;
    std::string selected;
    size_t selected_index = 0;
    int selected_score = 0;
    bool tie_broken_by_reference = false;
    bool tie_broken_lexicographically = false;
};

/// Picks the maximum-peakedness candidate. Ties among distinct strings are
/// broken by minimum edit distance to the greedy reference, then
/// lexicographically smallest string so the result is deterministic.
inline PeakednessReport select_representative(const std::vector<std::string>& candidates,
                                              const std::vector<int>& scores,
                                              const std::string& reference) {
    if (candidates.empty())
        throw std::invalid_argument("select_representative: empty candidate list");
    if (scores.size() != candidates.size())
        throw std::invalid_argument("select_representative: scores/candidates size mismatch");
    if (reference.empty())
        throw std::invalid_argument("select_representative: empty reference");

    PeakednessReport report;
    report.scores = scores;

    int max_phi = *std::max_element(scores.begin(), scores.end());
    std::set<std::string> tied;
    for (size_t i = 0; i < candidates.size(); ++i) {
        if (scores[i] == max_phi) {
            report.argmax_set.push_back(i);
            tied.insert(candidates[i]);
        }
    }

    std::string winner;
    if (tied.size() == 1) {
        winner = *tied.begin();
    } else {
        report.tie_broken_by_reference = true;
        int best = -1;
        std::set<std::string> nearest;
        for (const auto& s : tied) {
            int d = edit_distance(s, reference);
            if (best < 0 || d < best) {
                best = d;
                nearest = {s};
            } else if (d == best) {
                nearest.insert(s);
            }
        }
        if (nearest.size() > 1) report.tie_broken_lexicographically = true;
        winner = *nearest.begin();  // std::set orders lexicographically
    }

    report.selected = winner;
    report.selected_score = max_phi;
    for (size_t idx : report.argmax_set) {
        if (candidates[idx] == winner) {
            report.selected_index = idx;
            break;
        }
    }
    return report;
}

/// One-shot pipeline: threshold (Eq. form tau = alpha * l_max), scores, and
/// representative selection for a sampled candidate set.
inline PeakednessReport analyze_candidates(const std::vector<std::string>& candidates,
                                           const std::string& reference, double alpha) {
    Threshold th = compute_threshold(candidates, alpha);
    std::vector<int> phi = peakedness_scores(candidates, th.tau);
    PeakednessReport report = select_representative(candidates, phi, reference);
    report.threshold = th.tau;
    report.max_length = th.max_length;
    return report;
}

/// Candidates ordered by preference: peakedness descending, then distance
/// to the reference, then lexicographic. Distinct strings only. This is the
/// order collision resolution walks when a selection is already claimed.
inline std::vector<std::string> preference_order(const std::vector<std::string>& candidates,
                                                 const std::vector<int>& scores,
                                                 const std::string& reference) {
    std::map<std::string, int> phi_by_string;
    for (size_t i = 0; i < candidates.size(); ++i) {
        auto [it, inserted] = phi_by_string.emplace(candidates[i], scores[i]);
        (void)it;
        (void)inserted;
    }
    struct Entry {
        std::string name;
        int phi;
        int ref_dist;
    };
    std::vector<Entry> entries;
    entries.reserve(phi_by_string.size());
    for (const auto& [name, phi] : phi_by_string)
        entries.push_back({name, phi, edit_distance(name, reference)});
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.phi != b.phi) return a.phi > b.phi;
        if (a.ref_dist != b.ref_dist) return a.ref_dist < b.ref_dist;
        return a.name < b.name;
    });
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (auto& e : entries) out.push_back(std::move(e.name));
    return out;
}

}  // namespace toolalign
