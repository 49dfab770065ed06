#include "symdyn/counting.hpp"

namespace symdyn {

namespace {

void check_n(int n_max) {
    if (n_max < 0) throw InvalidInput("n_max must be nonnegative");
}

}  // namespace

CountsFrom counts_from(const ShiftGraph& g, const StateId& origin, int n_max) {
    check_n(n_max);
    CountsFrom out;
    out.region = explore(g, {origin}, n_max, Direction::forward);
    const auto& lg = out.region;
    out.by_step.assign(n_max + 1, std::vector<BigInt>(lg.size()));
    out.by_step[0][lg.find(origin)] = 1;
    for (int n = 1; n <= n_max; ++n) {
        const auto& prev = out.by_step[n - 1];
        auto& cur = out.by_step[n];
        for (std::size_t i = 0; i < lg.size(); ++i) {
            if (prev[i].is_zero()) continue;
            for (int j : lg.succ[i]) cur[j] += prev[i];
        }
    }
    return out;
}

CountsTo counts_to(const ShiftGraph& g, const StateId& target, int n_max) {
    check_n(n_max);
    CountsTo out;
    out.region = explore(g, {target}, n_max, Direction::backward);
    const auto& lg = out.region;
    out.by_step.assign(n_max + 1, std::vector<BigInt>(lg.size()));
    out.by_step[0][lg.find(target)] = 1;
    for (int n = 1; n <= n_max; ++n) {
        const auto& prev = out.by_step[n - 1];
        auto& cur = out.by_step[n];
        for (std::size_t i = 0; i < lg.size(); ++i) {
            if (prev[i].is_zero()) continue;
            for (int j : lg.pred[i]) cur[j] += prev[i];
        }
    }
    return out;
}

CountTable count_words(const ShiftGraph& g, const StateId& a, const StateId& b, int n_max) {
    g.require(a);
    g.require(b);
    auto cf = counts_from(g, a, n_max);
    CountTable t{a, b, std::vector<BigInt>(n_max + 1)};
    int j = cf.region.find(b);
    if (j >= 0)
        for (int n = 0; n <= n_max; ++n) t.counts[n] = cf.by_step[n][j];
    return t;
}

CountTable count_periodic(const ShiftGraph& g, const StateId& a, int n_max) {
    return count_words(g, a, a, n_max);
}

long double weighted_term(const BigInt& z, int n, double h) {
    if (z.is_zero()) return 0.0L;
    return z.convert_to<long double>() * std::exp(-static_cast<long double>(n) * h);
}

WeightedSumTrace weighted_loop_sum(const ShiftGraph& g, const StateId& a, double h, int n_max) {
    if (!(h > 0)) throw InvalidInput("h must be positive");
    auto table = count_periodic(g, a, n_max);
    WeightedSumTrace tr;
    tr.h = h;
    tr.n_max = n_max;
    CompensatedSum acc;
    for (int n = 0; n <= n_max; ++n) {
        long double t = weighted_term(table.counts[n], n, h);
        acc.add(t);
        tr.terms.push_back(t);
        tr.partial_sums.push_back(acc.value());
    }
    return tr;
}

}  // namespace symdyn
