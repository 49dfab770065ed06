#pragma once

// Brute-force reference computations used by the unit tests. They walk the
// graph word by word and share no code with the DP implementations.

#include <cstdint>
#include <map>
#include <vector>

#include "symdyn/shift_graph.hpp"

namespace oracle {

using symdyn::ShiftGraph;
using symdyn::StateId;

// counts[n][target] = number of words with n edges from origin.
inline void walk(const ShiftGraph& g, const StateId& s, int depth, int n_max,
                 std::vector<std::map<StateId, std::uint64_t>>& counts) {
    ++counts[depth][s];
    if (depth == n_max) return;
    for (const auto& t : g.successors(s)) walk(g, t, depth + 1, n_max, counts);
}

inline std::vector<std::map<StateId, std::uint64_t>> enumerate_words(const ShiftGraph& g, const StateId& origin,
                                                                       int n_max) {
    std::vector<std::map<StateId, std::uint64_t>> counts(n_max + 1);
    walk(g, origin, 0, n_max, counts);
    return counts;
}

// Every sequence of length `len` over `alphabet`, admissible or not.
inline std::vector<std::vector<StateId>> all_sequences(const std::vector<StateId>& alphabet, int len) {
    std::vector<std::vector<StateId>> out{{}};
    for (int i = 0; i < len; ++i) {
        std::vector<std::vector<StateId>> next;
        for (const auto& w : out)
            for (const auto& a : alphabet) {
                auto v = w;
                v.push_back(a);
                next.push_back(std::move(v));
            }
        out = std::move(next);
    }
    return out;
}

inline bool edges_ok(const ShiftGraph& g, const std::vector<StateId>& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        bool found = false;
        for (const auto& t : g.successors(w[i])) found = found || t == w[i + 1];
        if (!found) return false;
    }
    return true;
}

}  // namespace oracle
