#include "symdyn/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace symdyn {

ConformalFamily make_family(const ShiftGraph& g, double h, HarmonicFunction psi) {
    if (!(h >= 0)) throw InvalidInput("entropy must be nonnegative");
    ConformalFamily fam{g, h, std::move(psi), 0.0L};
    for (const auto& [s, v] : fam.psi.values) {
        if (!(v > 0)) throw InvalidInput("psi must be positive; psi('" + s.label + "') = " + std::to_string((double)v));
        fam.max_psi = std::max(fam.max_psi, v);
    }
    if (fam.psi.values.empty()) throw InvalidInput("psi has no values");
    return fam;
}

namespace {

long double decay(const ConformalFamily& fam, int n) { return std::exp(-static_cast<long double>(n) * fam.h); }

// Layers of the cylinder tree below `root`: layers[d][X] = number of depth-d cylinders ending at X.
std::vector<std::map<StateId, BigInt>> cylinder_layers(const ShiftGraph& g, const StateId& root, int depth) {
    std::vector<std::map<StateId, BigInt>> layers(depth + 1);
    layers[0][root] = 1;
    for (int d = 1; d <= depth; ++d)
        for (const auto& [x, c] : layers[d - 1])
            for (const auto& y : g.successors(x)) layers[d][y] += c;
    return layers;
}

// (A^r psi)(X), memoized.
class RefinedMass {
public:
    explicit RefinedMass(const ConformalFamily& fam) : fam_(fam) {}

    long double operator()(const StateId& x, int r) {
        if (r == 0) return fam_.psi_at(x);
        auto key = std::make_pair(x, r);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        CompensatedSum acc;
        for (const auto& y : fam_.graph.successors(x)) acc.add((*this)(y, r - 1));
        return memo_[key] = acc.value();
    }

private:
    const ConformalFamily& fam_;
    std::map<std::pair<StateId, int>, long double> memo_;
};

}  // namespace

CylinderMeasureValue cylinder_measure(const ConformalFamily& fam, const StateId& root,
                                      const std::vector<StateId>& future) {
    std::vector<StateId> word{root};
    word.insert(word.end(), future.begin(), future.end());
    if (!is_admissible(fam.graph, word)) throw InvalidInput("inadmissible cylinder (" + join_states(word) + ")");
    CylinderMeasureValue v;
    v.depth = static_cast<int>(future.size());
    v.value = decay(fam, v.depth) * fam.psi_at(word.back());
    return v;
}

long double cylinder_probability(const ConformalFamily& fam, const StateId& root, const std::vector<StateId>& future) {
    return cylinder_measure(fam, root, future).value / fam.psi_at(root);
}

CheckReport conformality_check(const ConformalFamily& fam, const StateId& root, int depth, double tolerance) {
    if (depth < 1) throw InvalidInput("conformality depth must be >= 1");
    auto layers = cylinder_layers(fam.graph, root, depth);
    RefinedMass refined(fam);
    CheckReport rep;
    rep.tolerance = tolerance;
    rep.roots = 1;
    const long double top = decay(fam, depth);
    for (int d = 0; d <= depth; ++d) {
        for (const auto& [x, count] : layers[d]) {
            rep.cylinders += count;
            long double lhs = top * refined(x, depth - d);
            long double rhs = decay(fam, d) * fam.psi_at(x);
            rep.max_discrepancy = std::max(rep.max_discrepancy, static_cast<double>(std::fabs(lhs - rhs)));
        }
    }
    rep.pass = rep.max_discrepancy < tolerance;
    return rep;
}

CheckReport consistency_check(const ConformalFamily& fam, const StateId& root, int depth, double tolerance) {
    auto layers = cylinder_layers(fam.graph, root, depth);
    CheckReport rep;
    rep.tolerance = tolerance;
    rep.roots = 1;
    for (int d = 0; d < depth; ++d) {
        const long double here = decay(fam, d), below = decay(fam, d + 1);
        for (const auto& [x, count] : layers[d]) {
            rep.cylinders += count;
            CompensatedSum children;
            for (const auto& y : fam.graph.successors(x)) children.add(below * fam.psi_at(y));
            long double gap = std::fabs(here * fam.psi_at(x) - children.value());
            rep.max_discrepancy = std::max(rep.max_discrepancy, static_cast<double>(gap));
        }
    }
    rep.pass = rep.max_discrepancy < tolerance;
    return rep;
}

bool support_check(const ConformalFamily& fam, const StateId& root, int depth) {
    auto layers = cylinder_layers(fam.graph, root, depth);
    for (int d = 0; d <= depth; ++d)
        for (const auto& [x, count] : layers[d])
            if (!(decay(fam, d) * fam.psi_at(x) > 0)) return false;
    return true;
}

CheckReport symbolic_holonomy_check(const ConformalFamily& fam, const StateId& root_a, const StateId& root_b,
                                    int depth) {
    fam.graph.require(root_a);
    fam.graph.require(root_b);
    // Walk both successor trees in lockstep; the labels must agree at every node.
    CheckReport rep;
    rep.roots = root_a == root_b ? 1 : 2;
    std::function<void(const StateId&, const StateId&, int)> walk = [&](const StateId& a, const StateId& b, int d) {
        if (a != b)
            throw InvalidInput("holonomy precondition violated: futures differ ('" + a.label + "' vs '" + b.label +
                               "')");
        rep.cylinders += 1;
        long double ma = decay(fam, d) * fam.psi_at(a);
        long double mb = decay(fam, d) * fam.psi_at(b);
        rep.max_discrepancy = std::max(rep.max_discrepancy, static_cast<double>(std::fabs(ma - mb)));
        if (d == depth) return;
        const auto& sa = fam.graph.successors(a);
        const auto& sb = fam.graph.successors(b);
        if (sa != sb)
            throw InvalidInput("holonomy precondition violated: successor sets of '" + a.label + "' and '" +
                               b.label + "' differ");
        for (std::size_t i = 0; i < sa.size(); ++i) walk(sa[i], sb[i], d + 1);
    };
    if (root_a != root_b) {
        // Different roots share a future tree only if their successor lists agree.
        const auto& sa = fam.graph.successors(root_a);
        const auto& sb = fam.graph.successors(root_b);
        if (sa != sb)
            throw InvalidInput("holonomy precondition violated: roots '" + root_a.label + "' and '" + root_b.label +
                               "' have different successor trees");
        for (const auto& s : sa) walk(s, s, 1);
    } else {
        walk(root_a, root_b, 0);
    }
    rep.tolerance = 0.0;
    rep.pass = rep.max_discrepancy == 0.0;
    return rep;
}

std::vector<long double> global_leaf_measure(const ConformalFamily& fam, const std::vector<StateId>& past,
                                             const LeafArc& arc, int n) {
    if (past.empty()) throw InvalidInput("past must be nonempty");
    if (!is_admissible(fam.graph, past)) throw InvalidInput("inadmissible past (" + join_states(past) + ")");
    const int L = static_cast<int>(past.size());
    if (n < 0 || n > L - 1) throw InvalidInput("n must lie in [0, " + std::to_string(L - 1) + "]");
    auto at = [&](int t) -> const StateId& { return past[L - 1 - t]; };  // symbol at time -t

    for (const auto& c : arc.cylinders) {
        if (c.suffix.empty()) throw InvalidInput("leaf cylinder needs a nonempty suffix");
        if (static_cast<int>(c.suffix.size()) > L) throw InvalidInput("leaf cylinder suffix longer than the past");
        std::vector<StateId> w = c.suffix;
        w.insert(w.end(), c.future.begin(), c.future.end());
        if (!is_admissible(fam.graph, w)) throw InvalidInput("inadmissible leaf cylinder (" + join_states(w) + ")");
    }

    std::vector<long double> trace;
    for (int m = 0; m <= n; ++m) {
        const StateId& start = at(m);
        CompensatedSum acc;
        if (arc.whole_leaf) {
            auto cf = counts_from(fam.graph, start, m);
            for (std::size_t i = 0; i < cf.region.size(); ++i) {
                const auto& z = cf.by_step[m][i];
                if (z.is_zero()) continue;
                acc.add(z.convert_to<long double>() * fam.psi_at(cf.region.states[i]));
            }
        }
        for (const auto& c : arc.cylinders) {
            const int j = static_cast<int>(c.suffix.size()) - 1;
            const long double mass =
                decay(fam, static_cast<int>(c.future.size())) * fam.psi_at(c.future.empty() ? c.suffix.back()
                                                                                            : c.future.back());
            BigInt count = 0;
            if (j <= m) {
                auto t = count_words(fam.graph, start, c.suffix.front(), m - j);
                count = t.counts[m - j];
            } else {
                bool match = true;
                for (int t = m; t <= j && match; ++t) {
                    // suffix[j - t] sits at time -t; times beyond -m are frozen to the past.
                    if (t > m && c.suffix[j - t] != at(t)) match = false;
                    if (t == m && c.suffix[j - t] != start) match = false;
                }
                count = match ? 1 : 0;
            }
            if (!count.is_zero()) acc.add(count.convert_to<long double>() * mass);
        }
        trace.push_back(acc.value());
    }
    return trace;
}

RayMass periodic_ray_mass(const ConformalFamily& fam, const std::vector<StateId>& loop, int k) {
    if (loop.empty()) throw InvalidInput("loop must be nonempty");
    if (k < 0) throw InvalidInput("k must be nonnegative");
    std::vector<StateId> closed = loop;
    closed.push_back(loop.front());
    if (!is_admissible(fam.graph, closed)) throw InvalidInput("not a loop: (" + join_states(closed) + ")");
    RayMass rm;
    rm.loop_length = static_cast<int>(loop.size());
    const StateId& a = loop.front();
    const int steps = k * rm.loop_length;
    rm.formula = std::exp(static_cast<long double>(steps) * fam.h) * fam.psi_at(a);

    auto cf = counts_from(fam.graph, a, steps);
    CompensatedSum acc;
    rm.summed_available = true;
    for (std::size_t i = 0; i < cf.region.size(); ++i) {
        const auto& z = cf.by_step[steps][i];
        if (z.is_zero()) continue;
        if (!fam.psi.defined(cf.region.states[i])) {
            rm.summed_available = false;
            break;
        }
        acc.add(z.convert_to<long double>() * fam.psi_at(cf.region.states[i]));
    }
    rm.summed = rm.summed_available ? acc.value() : 0.0L;
    return rm;
}

FamilyReport verify_family(const ConformalFamily& fam, int depth, double tolerance) {
    FamilyReport rep;
    rep.conformality.tolerance = rep.consistency.tolerance = tolerance;
    for (const auto& [root, v] : fam.psi.values) {
        auto reach = explore(fam.graph, {root}, depth, Direction::forward);
        bool covered = std::all_of(reach.states.begin(), reach.states.end(),
                                   [&](const StateId& s) { return fam.psi.defined(s); });
        if (!covered) continue;
        ++rep.roots_checked;
        auto c = conformality_check(fam, root, depth, tolerance);
        auto k = consistency_check(fam, root, depth, tolerance);
        rep.conformality.max_discrepancy = std::max(rep.conformality.max_discrepancy, c.max_discrepancy);
        rep.conformality.cylinders += c.cylinders;
        rep.consistency.max_discrepancy = std::max(rep.consistency.max_discrepancy, k.max_discrepancy);
        rep.consistency.cylinders += k.cylinders;
        rep.support_ok = rep.support_ok && support_check(fam, root, depth);
    }
    rep.conformality.roots = rep.consistency.roots = rep.roots_checked;
    rep.conformality.pass = rep.roots_checked > 0 && rep.conformality.max_discrepancy < tolerance;
    rep.consistency.pass = rep.roots_checked > 0 && rep.consistency.max_discrepancy < tolerance;
    return rep;
}

}  // namespace symdyn
