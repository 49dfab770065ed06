#include "symdyn/torus_leaf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace symdyn {

std::vector<ArcPiece> decompose_arc(const MarkovPartition& p, const UnstableArc& arc, long double tol) {
    std::vector<ArcPiece> out;
    long double t = arc.t0;
    while (t < arc.t1 - tol) {
        const Vec2 q{arc.base.x + t, arc.base.y};
        const Vec2 y = reduce(p.map.from_eigen(q));
        const Placement* pick = nullptr;
        auto places = locate(p, y, tol);
        for (const auto& pl : places) {
            const Box b = p.rects[pl.rect].box();
            if (pl.pos.x < b.u1 - tol && pl.pos.y < b.s1 - tol) {
                pick = &pl;
                break;
            }
        }
        if (!pick) throw NumericalFailure("arc point not covered by any rectangle");
        const Box b = p.rects[pick->rect].box();
        const long double a = std::max(0.0L, pick->pos.x - b.u0);
        const long double len = std::min(b.width() - a, arc.t1 - t);
        out.push_back({pick->rect, a, a + len});
        t += len;
    }
    return out;
}

ConformalFamily partition_family(const MarkovPartition& p) {
    auto hf = harmonic_finite(p.transition);
    const double h = hf.h;
    return make_family(p.transition, h, std::move(hf));
}

namespace {

struct Child {
    int to;
    long double shift;  // parent relative coordinate of the child's origin
};

struct CylinderTree {
    std::vector<std::vector<Child>> children;
    std::vector<long double> width;
    std::vector<long double> psi;
    std::vector<std::vector<long double>> mass;  // mass[r][i] = (A^r psi)(i)
};

CylinderTree make_tree(const ConformalFamily& fam, const MarkovPartition& p, int depth) {
    CylinderTree T;
    const std::size_t n = p.rects.size();
    T.children.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        T.width.push_back(p.rects[i].u_extent);
        T.psi.push_back(fam.psi_at(p.rects[i].id));
    }
    for (const auto& e : p.transitions) {
        const Vec2 d = p.map.lattice_eigen(e.offset);
        const long double shift = (p.rects[e.to].box().u0 + d.x) / p.map.lambda_u - p.rects[e.from].box().u0;
        T.children[e.from].push_back({e.to, shift});
    }
    T.mass.push_back(T.psi);
    for (int r = 1; r <= depth; ++r) {
        std::vector<long double> next(n, 0.0L);
        for (std::size_t i = 0; i < n; ++i) {
            CompensatedSum acc;
            for (const auto& c : T.children[i]) acc.add(T.mass[r - 1][c.to]);
            next[i] = acc.value();
        }
        T.mass.push_back(std::move(next));
    }
    return T;
}

struct PieceSums {
    CompensatedSum inner, outer;
    std::size_t straddling = 0;
};

void measure_piece(const CylinderTree& T, const ArcPiece& piece, int depth, long double lambda, long double scale,
                   long double tol, PieceSums& acc) {
    struct Node {
        int state, d;
        long double a, b;  // time-0 coordinate = a + b * relative coordinate
    };
    std::vector<Node> stack{{piece.rect, 0, 0.0L, 1.0L}};
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        long double x0 = nd.a, x1 = nd.a + nd.b * T.width[nd.state];
        if (x0 > x1) std::swap(x0, x1);
        if (x1 <= piece.a + tol || x0 >= piece.b - tol) continue;
        const long double sub = scale * T.mass[depth - nd.d][nd.state];
        if (x0 >= piece.a - tol && x1 <= piece.b + tol) {
            acc.inner.add(sub);
            acc.outer.add(sub);
            continue;
        }
        if (nd.d == depth) {
            acc.outer.add(sub);
            ++acc.straddling;
            continue;
        }
        for (const auto& c : T.children[nd.state])
            stack.push_back({c.to, nd.d + 1, nd.a + nd.b * c.shift, nd.b / lambda});
    }
}

}  // namespace

LeafMeasure leaf_arc_measure(const ConformalFamily& fam, const MarkovPartition& p, const UnstableArc& arc, int depth) {
    if (depth < 0) throw InvalidInput("depth must be nonnegative");
    LeafMeasure m;
    m.depth = depth;
    if (!(arc.t1 > arc.t0)) return m;
    const auto pieces = decompose_arc(p, arc);
    m.pieces = pieces.size();
    const auto T = make_tree(fam, p, depth);
    const long double scale = std::exp(-(long double)depth * fam.h);
    PieceSums acc;
    for (const auto& piece : pieces) measure_piece(T, piece, depth, p.map.lambda_u, scale, 1e-12L, acc);
    m.inner = acc.inner.value();
    m.outer = acc.outer.value();
    m.boundary_cylinders = acc.straddling;
    m.certified_bound = (long double)acc.straddling * scale * fam.max_psi;
    return m;
}

UnstableArc stable_holonomy(const MarkovPartition&, const UnstableArc& arc, const Vec2& target) {
    UnstableArc out = arc;
    out.base.y = target.y;
    return out;
}

UnstableArc push_forward(const MarkovPartition& p, const UnstableArc& arc, int k) {
    UnstableArc out;
    out.base = p.map.apply_eigen(arc.base, k);
    const long double s = std::pow(p.map.lambda_u, (long double)k);
    out.t0 = std::min(s * arc.t0, s * arc.t1);
    out.t1 = std::max(s * arc.t0, s * arc.t1);
    return out;
}

HolonomyReport holonomy_invariance_check(const ConformalFamily& fam, const MarkovPartition& p, const UnstableArc& arc,
                                         const Vec2& target, int depth, int coarse_depth) {
    HolonomyReport rep;
    rep.depth = depth;
    rep.coarse_depth = coarse_depth;
    const UnstableArc image = stable_holonomy(p, arc, target);
    auto a = leaf_arc_measure(fam, p, arc, depth), b = leaf_arc_measure(fam, p, image, depth);
    auto ac = leaf_arc_measure(fam, p, arc, coarse_depth), bc = leaf_arc_measure(fam, p, image, coarse_depth);
    rep.measure_source = a.value();
    rep.measure_image = b.value();
    rep.discrepancy = std::fabs(a.value() - b.value());
    rep.combined_bound = a.certified_bound + b.certified_bound;
    rep.coarse_discrepancy = std::fabs(ac.value() - bc.value());
    rep.coarse_bound = ac.certified_bound + bc.certified_bound;
    rep.boundary_cylinders = a.boundary_cylinders + b.boundary_cylinders;
    rep.coarse_boundary_cylinders = ac.boundary_cylinders + bc.boundary_cylinders;
    rep.within_bound = rep.discrepancy <= rep.combined_bound;
    // combined_bound = count * e^{-Nh} max psi, so the bound shrinks by e^{-(N-Nc)h}
    // exactly when the count of straddling cylinders does not grow.
    rep.bound_decays = rep.boundary_cylinders <= rep.coarse_boundary_cylinders;
    std::set<int> ra, rb;
    for (const auto& pc : decompose_arc(p, arc)) ra.insert(pc.rect);
    for (const auto& pc : decompose_arc(p, image)) rb.insert(pc.rect);
    rep.crosses_rectangles = ra != rb;
    return rep;
}

LeafConformality conformality_on_leaves(const ConformalFamily& fam, const MarkovPartition& p, const UnstableArc& arc,
                                        int k, int depth, double rel_tol) {
    if (k < 0) throw InvalidInput("k must be nonnegative");
    LeafConformality rep;
    rep.k = k;
    auto m0 = leaf_arc_measure(fam, p, arc, depth);
    auto mk = leaf_arc_measure(fam, p, push_forward(p, arc, k), depth);
    rep.expected = std::exp((long double)k * fam.h);
    rep.ratio = mk.value() / m0.value();
    rep.relative_error = std::fabs(rep.ratio - rep.expected) / rep.expected;
    // Arcs made of whole rectangle sides have zero truncation bound; allow rounding.
    const long double rounding = 1e-12L * mk.value();
    rep.bound_slack = std::fabs(mk.value() - rep.expected * m0.value()) -
                      (mk.certified_bound + rep.expected * m0.certified_bound + rounding);
    rep.pass = rep.relative_error <= rel_tol && rep.bound_slack <= 0;
    return rep;
}

RayTrace periodic_ray_divergence(const ConformalFamily& fam, const MarkovPartition& p, const RationalPoint& fixed,
                                 int direction, int K, int depth) {
    if (direction != 1 && direction != -1) throw InvalidInput("direction must be +1 or -1");
    RayTrace tr;
    tr.period = period_of(p.map, fixed, 100000);
    const Vec2 base = p.map.to_eigen(standard_coords(fixed));
    for (int k = 0; k <= K; ++k) {
        const long double len = std::fabs(std::pow(p.map.lambda_u, (long double)(k * tr.period)));
        UnstableArc arc{base, direction > 0 ? 0.0L : -len, direction > 0 ? len : 0.0L};
        auto m = leaf_arc_measure(fam, p, arc, depth);
        tr.measured.push_back(m.value());
        tr.bounds.push_back(m.certified_bound);
    }
    long double sxy = 0, sxx = 0;
    for (int k = 0; k <= K; ++k) {
        tr.formula.push_back(std::exp((long double)(k * tr.period) * fam.h) * tr.measured[0]);
        sxy += k * std::log(tr.measured[k] / tr.measured[0]);
        sxx += (long double)k * k;
    }
    tr.fitted_exponent = sxx > 0 ? (double)(sxy / sxx) : 0.0;
    return tr;
}

long double signed_unstable_measure(const ConformalFamily& fam, const MarkovPartition& p, const Vec2& base,
                                    long double t, int depth) {
    if (t >= 0) return leaf_arc_measure(fam, p, {base, 0.0L, t}, depth).value();
    return -leaf_arc_measure(fam, p, {base, t, 0.0L}, depth).value();
}

namespace {

template <class F>
long double solve_monotone(F&& measure, long double target, long double max_length) {
    if (target == 0) return 0.0L;
    const long double sign = target > 0 ? 1.0L : -1.0L;
    const long double goal = std::fabs(target);
    long double lo = 0.0L, hi = 0.25L;
    while (std::fabs(measure(sign * hi)) < goal) {
        lo = hi;
        hi *= 2;
        if (hi > max_length) {
            long double reach = std::fabs(measure(sign * max_length));
            throw RangeError("coordinate " + std::to_string((double)target) +
                             " exceeds the available leaf mass " + std::to_string((double)reach));
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15L; ++it) {
        long double mid = (lo + hi) / 2;
        if (std::fabs(measure(sign * mid)) < goal)
            lo = mid;
        else
            hi = mid;
    }
    return sign * (lo + hi) / 2;
}

}  // namespace

MargulisPoint margulis_coordinates(const MargulisSolver& S, const RationalPoint& fixed, long double x, long double y) {
    const auto f1 = apply(S.p.map, fixed, 1);
    if (f1.x != fixed.x || f1.y != fixed.y) throw InvalidInput("base point is not fixed by the map");
    const Vec2 P = S.p.map.to_eigen(standard_coords(fixed));
    auto mu_u = [&](const Vec2& from) {
        return [&, from](long double t) { return signed_unstable_measure(S.fam_u, S.p, from, t, S.depth); };
    };
    // Stable arcs are unstable arcs of the inverse map, with coordinates swapped.
    auto mu_s = [&](const Vec2& from) {
        return [&, from](long double r) {
            return signed_unstable_measure(S.fam_s, S.p_inv, {from.y, from.x}, r, S.depth);
        };
    };
    const long double r_y = solve_monotone(mu_s(P), y, S.max_length);
    const long double t_x = solve_monotone(mu_u(P), x, S.max_length);
    const Vec2 y_pt{P.x, P.y + r_y}, x_pt{P.x + t_x, P.y};
    MargulisPoint out;
    out.t = solve_monotone(mu_u(y_pt), x, S.max_length);
    out.r = solve_monotone(mu_s(x_pt), y, S.max_length);
    out.z_lift = {P.x + out.t, P.y + out.r};
    out.z = reduce(S.p.map.from_eigen(out.z_lift));
    out.consistency = std::max(std::fabs(out.t - t_x), std::fabs(out.r - r_y));
    return out;
}

CylinderImage cylinder_image_arc(const MarkovPartition& p, const std::vector<StateId>& word, long double height) {
    if (word.empty()) throw InvalidInput("cylinder word must be nonempty");
    if (!(height > 0 && height < 1)) throw InvalidInput("height must lie in (0,1)");
    std::vector<int> c;
    for (const auto& s : word) c.push_back(p.index_of(s));
    long double a = 0.0L, b = 1.0L;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        auto e = p.find_edge(c[i], c[i + 1]);
        if (!e) throw InvalidInput("inadmissible cylinder word at " + word[i].label + "->" + word[i + 1].label);
        const Vec2 d = p.map.lattice_eigen(e->offset);
        const long double shift = (p.rects[c[i + 1]].box().u0 + d.x) / p.map.lambda_u - p.rects[c[i]].box().u0;
        a += b * shift;
        b /= p.map.lambda_u;
    }
    long double x0 = a, x1 = a + b * p.rects[c.back()].u_extent;
    if (x0 > x1) std::swap(x0, x1);
    const Box r0 = p.rects[c.front()].box();
    CylinderImage out;
    out.word = word;
    out.arc = {{r0.u0, r0.s0 + height * r0.height()}, x0, x1};
    return out;
}

StableSegment stable_segment_through(const MarkovPartition& p, int rect, const RationalPoint& q) {
    const Box b = p.rects[rect].box();
    for (const auto& pl : locate(p, standard_coords(q), 0.0L)) {
        if (pl.rect != rect) continue;
        if (pl.pos.x > b.u0 && pl.pos.x < b.u1 && pl.pos.y > b.s0 && pl.pos.y < b.s1) return {rect, pl.pos.x};
    }
    throw InvalidInput("point is not interior to rectangle " + p.rects[rect].id.label);
}

long long intersection_count(const MarkovPartition& p, const UnstableArc& arc, int i, const StableSegment& seg) {
    if (i < 0) throw InvalidInput("iterate must be nonnegative");
    const auto& f = p.map;
    const long double lu = std::pow(f.lambda_u, (long double)i), ls = std::pow(f.lambda_s, (long double)i);
    long double u0 = lu * (arc.base.x + arc.t0), u1 = lu * (arc.base.x + arc.t1);
    if (u0 > u1) std::swap(u0, u1);
    const long double s = ls * arc.base.y;
    const Box r = p.rects[seg.rect].box();
    const Box want{u0 - seg.u, u1 - seg.u, s - r.s1, s - r.s0};
    // Rounding in u0, u1 is relative to their magnitude, not to the arc length.
    const long double eps = 1e-12L * std::max({1.0L, std::fabs(u0), std::fabs(u1)});
    const Box wide{want.u0 - eps, want.u1 + eps, want.s0 - eps, want.s1 + eps};
    const Box narrow{want.u0 + eps, want.u1 - eps, want.s0 + eps, want.s1 - eps};
    const auto n_wide = lattice_points_in(f, wide).size(), n_narrow = lattice_points_in(f, narrow).size();
    if (n_wide != n_narrow)
        throw StructuralViolation("degenerate intersection: a translate meets the arc at an endpoint");
    return (long long)n_wide;
}

}  // namespace symdyn
