#pragma once

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "toolalign/peakedness.hpp"

// Built-in brute-force oracles behind `toolalign verify`. These deliberately
// re-derive results through a different route than the library: a full DP
// table instead of the rolling rows, an unoptimized double loop instead of
// the symmetric pair walk.

namespace toolalign::oracles {

/// Reference Levenshtein: full (m+1) x (n+1) table, ASCII inputs.
inline int edit_distance_full_table(const std::string& a, const std::string& b) {
    const size_t m = a.size(), n = b.size();
    std::vector<std::vector<int>> d(m + 1, std::vector<int>(n + 1, 0));
    for (size_t i = 0; i <= m; ++i) d[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= n; ++j) d[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= m; ++i) {
        for (size_t j = 1; j <= n; ++j) {
            int del = d[i - 1][j] + 1;
            int ins = d[i][j - 1] + 1;
            int sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min(del, std::min(ins, sub));
        }
    }
    return d[m][n];
}

/// Reference peakedness: literal double loop over all ordered pairs.
inline std::vector<int> peakedness_naive(const std::vector<std::string>& candidates, double tau) {
    std::vector<int> phi(candidates.size(), 0);
    for (size_t i = 0; i < candidates.size(); ++i)
        for (size_t j = 0; j < candidates.size(); ++j)
            if (j != i && edit_distance_full_table(candidates[i], candidates[j]) <= tau)
                ++phi[i];
    return phi;
}

inline std::string random_word(std::mt19937_64& rng, size_t max_len) {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz_";
    std::uniform_int_distribution<size_t> len_dist(0, max_len);
    std::uniform_int_distribution<size_t> ch_dist(0, sizeof(alphabet) - 2);
    size_t len = len_dist(rng);
    std::string s;
    s.reserve(len);
    for (size_t i = 0; i < len; ++i) s += alphabet[ch_dist(rng)];
    return s;
}

inline std::vector<std::string> random_candidates(std::mt19937_64& rng, size_t max_n,
                                                  size_t max_len) {
    std::uniform_int_distribution<size_t> n_dist(1, max_n);
    size_t n = n_dist(rng);
    std::vector<std::string> out;
    out.reserve(n);
    // duplicate-heavy: draw from a small pool so clusters actually form
    std::uniform_int_distribution<size_t> pool_dist(1, std::max<size_t>(1, n / 2));
    size_t pool_size = pool_dist(rng);
    std::vector<std::string> pool;
    for (size_t i = 0; i < pool_size; ++i) {
        std::string w = random_word(rng, max_len);
        if (w.empty()) w = "x";
        pool.push_back(w);
    }
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    for (size_t i = 0; i < n; ++i) out.push_back(pool[pick(rng)]);
    return out;
}

struct OracleResult {
    bool passed = true;
    std::string detail;  // first mismatch, for diagnostics
};

/// Library edit distance vs full-table oracle on random pairs, plus the
/// metric laws on random triples.
inline OracleResult check_edit_distance(std::mt19937_64& rng, int cases, bool inject_fault) {
    for (int c = 0; c < cases; ++c) {
        std::string a = random_word(rng, 24);
        std::string b = random_word(rng, 24);
        int expected = edit_distance_full_table(a, b);
        int got = edit_distance(a, b);
        if (inject_fault && c == cases / 2) got += 1;
        if (got != expected) {
            std::ostringstream ss;
            ss << "edit_distance(\"" << a << "\", \"" << b << "\") = " << got << ", oracle says "
               << expected;
            return {false, ss.str()};
        }
    }
    for (int c = 0; c < cases; ++c) {
        std::string a = random_word(rng, 16);
        std::string b = random_word(rng, 16);
        std::string x = random_word(rng, 16);
        int dab = edit_distance(a, b);
        int dba = edit_distance(b, a);
        int daa = edit_distance(a, a);
        if (dab != dba) return {false, "symmetry violated for \"" + a + "\", \"" + b + "\""};
        if (daa != 0) return {false, "identity violated for \"" + a + "\""};
        if (dab > edit_distance(a, x) + edit_distance(x, b))
            return {false, "triangle inequality violated for \"" + a + "\", \"" + b + "\", \"" +
                               x + "\""};
    }
    return {};
}

/// Library peakedness vs the naive double loop across an alpha sweep, plus
/// alpha-monotonicity of every score.
inline OracleResult check_peakedness(std::mt19937_64& rng, int cases, bool inject_fault) {
    const double alphas[] = {0.0, 0.1, 0.2, 0.3, 1.0};
    for (int c = 0; c < cases; ++c) {
        std::vector<std::string> candidates = random_candidates(rng, 64, 12);
        std::vector<std::vector<int>> by_alpha;
        for (double alpha : alphas) {
            Threshold th = compute_threshold(candidates, alpha);
            std::vector<int> got = peakedness_scores(candidates, th.tau);
            std::vector<int> expected = peakedness_naive(candidates, th.tau);
            if (inject_fault && c == cases / 2) got[0] += 1;
            if (got != expected) {
                std::ostringstream ss;
                ss << "peakedness mismatch at case " << c << ", alpha " << alpha;
                return {false, ss.str()};
            }
            by_alpha.push_back(std::move(got));
        }
        for (size_t k = 1; k < by_alpha.size(); ++k) {
            for (size_t i = 0; i < by_alpha[k].size(); ++i) {
                if (by_alpha[k][i] < by_alpha[k - 1][i]) {
                    std::ostringstream ss;
                    ss << "alpha monotonicity violated at case " << c << ", candidate " << i;
                    return {false, ss.str()};
                }
            }
        }
    }
    return {};
}

/// Selected string never changes under candidate permutation.
inline OracleResult check_permutation_invariance(std::mt19937_64& rng, int cases,
                                                 bool inject_fault) {
    for (int c = 0; c < cases; ++c) {
        std::vector<std::string> candidates = random_candidates(rng, 32, 10);
        std::string reference = random_word(rng, 10);
        if (reference.empty()) reference = "ref";
        PeakednessReport base = analyze_candidates(candidates, reference, 0.2);
        for (int p = 0; p < 4; ++p) {
            std::vector<std::string> shuffled = candidates;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            PeakednessReport other = analyze_candidates(shuffled, reference, 0.2);
            std::string got = other.selected;
            if (inject_fault && c == cases / 2) got += "_x";
            if (got != base.selected) {
                std::ostringstream ss;
                ss << "selection changed under permutation at case " << c << ": \""
                   << base.selected << "\" vs \"" << got << "\"";
                return {false, ss.str()};
            }
        }
    }
    return {};
}

}  // namespace toolalign::oracles
