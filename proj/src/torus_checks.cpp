#include "symdyn/torus_checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "symdyn/counting.hpp"

namespace symdyn {

RoundTripSummary roundtrip_sweep(const MarkovPartition& p, std::size_t samples, int n, std::uint64_t seed) {
    RoundTripSummary s;
    s.samples = samples;
    std::mt19937_64 rng(seed);
    bool ok = true;
    for (std::size_t i = 0; i < samples; ++i) {
        const TorusPoint x = random_dyadic(rng);
        const Vec2 xs = standard_coords(std::get<RationalPoint>(x.repr));
        const auto codes = code_point(p, x, n);
        if (codes.size() == 1) ++s.uniquely_coded;
        if (codes.empty()) ok = false;
        for (const auto& it : codes) {
            const long double d = torus_distance(xs, it.center);
            s.max_radius = std::max(s.max_radius, it.radius);
            s.worst_distance_ratio = std::max(s.worst_distance_ratio, d / it.radius);
            if (d > it.radius + 1e-12L) ok = false;
        }
    }
    s.pass = ok;
    return s;
}

namespace {

void words_up_to(const ShiftGraph& g, std::vector<StateId>& cur, int depth, std::vector<std::vector<StateId>>& out) {
    out.push_back(cur);
    if ((int)cur.size() - 1 == depth) return;
    for (const auto& s : g.successors(cur.back())) {
        cur.push_back(s);
        words_up_to(g, cur, depth, out);
        cur.pop_back();
    }
}

}  // namespace

IntersectionSummary intersection_sweep(const MarkovPartition& p, int max_depth, int max_i) {
    IntersectionSummary s;
    std::vector<std::vector<StateId>> words;
    for (const auto& st : p.transition.all_states()) {
        std::vector<StateId> cur{st};
        words_up_to(p.transition, cur, max_depth, words);
    }
    std::vector<StableSegment> segments;
    for (std::size_t r = 0; r < p.rects.size(); ++r)
        segments.push_back(stable_segment_through(p, (int)r, find_periodic_point(p, (int)r)));

    const long double height = 0.3183098861837907L;
    for (const auto& w : words) {
        const int N = (int)w.size() - 1;
        const auto img = cylinder_image_arc(p, w, height);
        for (const auto& seg : segments) {
            const StateId& omega = p.rects[seg.rect].id;
            const auto table = count_words(p.transition, w.back(), omega, std::max(0, max_i - N));
            for (int i = 0; i <= max_i; ++i) {
                const long long geo = intersection_count(p, img.arc, i, seg);
                long long expect;
                if (i >= N) {
                    expect = table.counts[i - N].convert_to<long long>();
                    ++s.word_count_cases;
                } else {
                    // f^i of the cylinder image is the image of the shifted cylinder
                    // [c_i .. c_N] inside c_i; it meets the segment iff it covers u.
                    std::vector<StateId> tail(w.begin() + i, w.end());
                    const auto sub = cylinder_image_arc(p, tail, height);
                    expect = (w[i] == omega && sub.arc.base.x + sub.arc.t0 < seg.u &&
                              seg.u < sub.arc.base.x + sub.arc.t1)
                                 ? 1
                                 : 0;
                    ++s.membership_cases;
                }
                ++s.comparisons;
                if (geo != expect) {
                    if (s.mismatches == 0)
                        s.first_mismatch = "cylinder (" + join_states(w) + ") omega " + omega.label + " i=" +
                                           std::to_string(i) + ": geometric " + std::to_string(geo) +
                                           " vs symbolic " + std::to_string(expect);
                    ++s.mismatches;
                }
            }
        }
    }
    s.pass = s.mismatches == 0 && s.comparisons > 0;
    return s;
}

HolonomySummary holonomy_sweep(const ConformalFamily& fam, const MarkovPartition& p, std::size_t pairs,
                               std::size_t cross_pairs, int depth, int coarse_depth, std::uint64_t seed) {
    HolonomySummary s;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (std::size_t k = 0; k < pairs; ++k) {
        const bool cross = k < cross_pairs;
        const int r = (int)(k % p.rects.size());
        const Box b = p.rects[r].box();
        const long double s0 = b.s0 + (0.1L + 0.8L * U(rng)) * b.height();
        long double a = U(rng) * b.width(), c = U(rng) * b.width();
        if (a > c) std::swap(a, c);
        if (c - a < 0.05L * b.width()) c = std::min<long double>(b.width(), a + 0.05L * b.width());
        // Every fourth arc runs past the rectangle's unstable side into its neighbour.
        if (k % 4 == 3) c += 0.5L * b.width();
        UnstableArc arc{{b.u0, s0}, a, c};
        long double target;
        if (cross) {
            // Slide past the top or bottom side into the neighbouring rectangles.
            const long double extra = (0.05L + 0.6L * U(rng)) * b.height();
            target = (k % 2 == 0) ? b.s1 + extra : b.s0 - extra;
        } else {
            target = b.s0 + (0.1L + 0.8L * U(rng)) * b.height();
        }
        auto rep = holonomy_invariance_check(fam, p, arc, {arc.base.x, target}, depth, coarse_depth);
        ++s.pairs;
        if (rep.crosses_rectangles) ++s.cross_pairs;
        if (rep.within_bound) ++s.within_bound;
        if (rep.bound_decays) ++s.bound_decays;
        const long double factor = std::exp(-(long double)(depth - coarse_depth) * fam.h);
        const long double rounding = 1e-14L * std::max(rep.measure_source, rep.measure_image);
        if (rep.discrepancy <= factor * rep.coarse_discrepancy + rounding) ++s.discrepancy_decays;
        s.max_discrepancy = std::max(s.max_discrepancy, rep.discrepancy);
        s.max_bound = std::max(s.max_bound, rep.combined_bound);
        if (rep.coarse_discrepancy > 0)
            s.max_observed_ratio = std::max(s.max_observed_ratio, rep.discrepancy / rep.coarse_discrepancy);
    }
    s.pass = s.within_bound == s.pairs && s.bound_decays == s.pairs && s.cross_pairs >= cross_pairs;
    return s;
}

LeafConformalitySummary leaf_conformality_sweep(const ConformalFamily& fam, const MarkovPartition& p,
                                                std::size_t arcs, int k_max, int depth, std::uint64_t seed,
                                                double rel_tol) {
    LeafConformalitySummary s;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    bool ok = true;
    for (std::size_t j = 0; j < arcs; ++j) {
        const Box b = p.rects[j % p.rects.size()].box();
        UnstableArc arc{{b.u0, b.s0 + (0.1L + 0.8L * U(rng)) * b.height()}, 0.0L, b.width()};
        if (j % 2 == 1) {
            long double a = U(rng) * b.width(), c = U(rng) * b.width() * 1.5L;
            if (a > c) std::swap(a, c);
            arc.t0 = a;
            arc.t1 = c + 0.01L;
        }
        for (int k = 0; k <= k_max; ++k) {
            auto rep = conformality_on_leaves(fam, p, arc, k, depth, rel_tol);
            ++s.checks;
            s.max_relative_error = std::max(s.max_relative_error, rep.relative_error);
            ok = ok && rep.pass;
        }
    }
    s.pass = ok;
    return s;
}

LinearitySummary pi_p_linearity(const MargulisSolver& solver, const RationalPoint& fixed, int grid,
                                long double range, double tol) {
    LinearitySummary s;
    s.grid = grid;
    const int m = grid * grid;
    Eigen::MatrixXd X(m, 3);
    Eigen::MatrixXd Y(m, 2);
    std::vector<MargulisPoint> pts;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const long double x = -range + 2 * range * i / (grid - 1);
            const long double y = -range + 2 * range * j / (grid - 1);
            auto z = margulis_coordinates(solver, fixed, x, y);
            const int row = i * grid + j;
            X(row, 0) = (double)x;
            X(row, 1) = (double)y;
            X(row, 2) = 1.0;
            Y(row, 0) = (double)z.t;
            Y(row, 1) = (double)z.r;
            s.max_consistency = std::max(s.max_consistency, z.consistency);
            pts.push_back(z);
        }
    }
    Eigen::MatrixXd coef = X.colPivHouseholderQr().solve(Y);
    Eigen::MatrixXd resid = X * coef - Y;
    for (int r = 0; r < m; ++r)
        s.max_deviation = std::max<long double>(s.max_deviation, std::hypot(resid(r, 0), resid(r, 1)));
    s.monotone = true;
    for (int i = 1; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            if (!(pts[i * grid + j].t > pts[(i - 1) * grid + j].t)) s.monotone = false;
    s.pass = s.max_deviation < tol && s.monotone;
    return s;
}

}  // namespace symdyn
