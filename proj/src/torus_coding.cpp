#include "symdyn/torus_coding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace symdyn {

TorusPoint TorusPoint::rational(std::int64_t x, std::int64_t y, std::int64_t d) {
    if (d <= 0) throw InvalidInput("denominator must be positive");
    auto mod = [d](std::int64_t v) { return ((v % d) + d) % d; };
    return TorusPoint{RationalPoint{mod(x), mod(y), d}};
}

RationalPoint apply(const TorusAutomorphism& f, const RationalPoint& p, int k) {
    const IntMat m = k >= 0 ? f.matrix : f.inverse_matrix();
    RationalPoint q = p;
    const __int128 d = p.d;
    for (int i = 0; i < std::abs(k); ++i) {
        __int128 x = (__int128)m[0][0] * q.x + (__int128)m[0][1] * q.y;
        __int128 y = (__int128)m[1][0] * q.x + (__int128)m[1][1] * q.y;
        x %= d;
        y %= d;
        if (x < 0) x += d;
        if (y < 0) y += d;
        q.x = (std::int64_t)x;
        q.y = (std::int64_t)y;
    }
    return q;
}

Vec2 standard_coords(const RationalPoint& p) { return {(long double)p.x / p.d, (long double)p.y / p.d}; }

Vec2 reduce(const Vec2& v) {
    Vec2 r{v.x - std::floor(v.x), v.y - std::floor(v.y)};
    if (r.x >= 1.0L) r.x = 0.0L;
    if (r.y >= 1.0L) r.y = 0.0L;
    return r;
}

long double torus_distance(const Vec2& a, const Vec2& b) {
    long double dx = std::fabs(a.x - b.x), dy = std::fabs(a.y - b.y);
    dx -= std::floor(dx);
    dy -= std::floor(dy);
    dx = std::min(dx, 1.0L - dx);
    dy = std::min(dy, 1.0L - dy);
    return std::sqrt(dx * dx + dy * dy);
}

std::vector<Vec2> orbit(const TorusAutomorphism& f, const TorusPoint& x, int n) {
    std::vector<Vec2> out;
    if (const auto* r = std::get_if<RationalPoint>(&x.repr)) {
        RationalPoint back = apply(f, *r, -n);
        for (int k = -n; k <= n; ++k) {
            out.push_back(standard_coords(back));
            back = apply(f, back, 1);
        }
    } else {
        const Vec2 q = std::get<Vec2>(x.repr);
        for (int k = -n; k <= n; ++k) out.push_back(reduce(f.from_eigen(f.apply_eigen(q, k))));
    }
    return out;
}

std::vector<Placement> locate(const MarkovPartition& p, const Vec2& y, long double tol) {
    const Vec2 e = p.map.to_eigen(y);
    std::vector<Placement> out;
    for (std::size_t j = 0; j < p.rects.size(); ++j) {
        Box b = p.rects[j].box();
        Box q{b.u0 - e.x - tol, b.u1 - e.x + tol, b.s0 - e.y - tol, b.s1 - e.y + tol};
        for (const auto& t : lattice_points_in(p.map, q)) out.push_back({(int)j, e + p.map.lattice_eigen(t)});
    }
    return out;
}

namespace {

struct Interval {
    long double lo, hi;
};

Interval scaled(Interval a, long double k) {
    long double x = a.lo * k, y = a.hi * k;
    return {std::min(x, y), std::max(x, y)};
}

Interval meet(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

}  // namespace

Decoded decode(const MarkovPartition& p, const std::vector<StateId>& symbols, int n) {
    if (n < 0 || symbols.size() != static_cast<std::size_t>(2 * n + 1))
        throw InvalidInput("itinerary must have 2n+1 symbols");
    std::vector<int> c;
    for (const auto& s : symbols) c.push_back(p.index_of(s));
    std::vector<IntVec> delta;
    for (std::size_t t = 0; t + 1 < c.size(); ++t) {
        auto e = p.find_edge(c[t], c[t + 1]);
        if (!e) throw InvalidInput("inadmissible itinerary at " + symbols[t].label + "->" + symbols[t + 1].label);
        delta.push_back(e->offset);
    }
    const auto& f = p.map;
    // Unstable coordinate: pull the future constraints back to time 0.
    const int last = 2 * n;
    Interval U{p.rects[c[last]].box().u0, p.rects[c[last]].box().u1};
    for (int t = last - 1; t >= n; --t) {
        Box b = p.rects[c[t]].box();
        Vec2 d = f.lattice_eigen(delta[t]);
        U = meet({b.u0, b.u1}, scaled({U.lo + d.x, U.hi + d.x}, 1.0L / f.lambda_u));
    }
    // Stable coordinate: push the past constraints forward to time 0.
    Interval S{p.rects[c[0]].box().s0, p.rects[c[0]].box().s1};
    for (int t = 0; t < n; ++t) {
        Box b = p.rects[c[t + 1]].box();
        Vec2 d = f.lattice_eigen(delta[t]);
        Interval img = scaled(S, f.lambda_s);
        S = meet({b.s0, b.s1}, {img.lo - d.y, img.hi - d.y});
    }
    if (U.lo > U.hi + 1e-15L || S.lo > S.hi + 1e-15L)
        throw RangeError("empty intersection for itinerary centred at " + symbols[n].label);
    Decoded out;
    out.box = {U.lo, std::max(U.lo, U.hi), S.lo, std::max(S.lo, S.hi)};
    out.center_lift = {(out.box.u0 + out.box.u1) / 2, (out.box.s0 + out.box.s1) / 2};
    out.center = reduce(f.from_eigen(out.center_lift));
    const long double hw = out.box.width() / 2, hh = out.box.height() / 2;
    out.radius = std::max(f.from_eigen({hw, hh}).norm(), f.from_eigen({hw, -hh}).norm());
    return out;
}

std::vector<Itinerary> code_point(const MarkovPartition& p, const TorusPoint& x, int n, long double tol) {
    if (n < 1) throw InvalidInput("code_point needs n >= 1");
    const auto orb = orbit(p.map, x, n);
    std::vector<std::vector<Placement>> cand;
    for (const auto& y : orb) cand.push_back(locate(p, y, tol));

    // Consecutive placements must be related by the map and the edge offset.
    const long double link_tol = 1e-9L;
    std::set<std::vector<int>> words;
    std::vector<int> path;
    std::function<void(std::size_t, const Placement&)> extend = [&](std::size_t t, const Placement& cur) {
        path.push_back(cur.rect);
        if (t + 1 == cand.size()) {
            words.insert(path);
        } else {
            const Vec2 img = p.map.apply_eigen(cur.pos);
            for (const auto& nxt : cand[t + 1]) {
                auto e = p.find_edge(cur.rect, nxt.rect);
                if (!e) continue;
                Vec2 gap = img - p.map.lattice_eigen(e->offset) - nxt.pos;
                if (std::fabs(gap.x) <= link_tol && std::fabs(gap.y) <= link_tol) extend(t + 1, nxt);
            }
        }
        path.pop_back();
    };
    for (const auto& start : cand[0]) extend(0, start);

    std::vector<Itinerary> out;
    for (const auto& w : words) {
        Itinerary it;
        it.n = n;
        for (int r : w) it.symbols.push_back(p.rects[r].id);
        auto d = decode(p, it.symbols, n);
        it.center = d.center;
        it.radius = d.radius;
        out.push_back(std::move(it));
    }
    return out;
}

std::vector<StateId> random_itinerary(const MarkovPartition& p, int n, std::mt19937_64& rng) {
    const auto& states = p.transition.all_states();
    std::vector<StateId> out{states[rng() % states.size()]};
    for (int t = 0; t < 2 * n; ++t) {
        const auto& next = p.transition.successors(out.back());
        out.push_back(next[rng() % next.size()]);
    }
    return out;
}

RationalPoint find_periodic_point(const MarkovPartition& p, int rect, long double margin) {
    const Box b = p.rects[rect].box();
    for (std::int64_t d = 3; d <= 400; ++d) {
        for (std::int64_t x = 0; x < d; ++x) {
            for (std::int64_t y = 0; y < d; ++y) {
                RationalPoint q{x, y, d};
                for (const auto& pl : locate(p, standard_coords(q), 0.0L)) {
                    if (pl.rect != rect) continue;
                    const long double fu = (pl.pos.x - b.u0) / b.width(), fs = (pl.pos.y - b.s0) / b.height();
                    if (fu > margin && fu < 1 - margin && fs > margin && fs < 1 - margin) return q;
                }
            }
        }
    }
    throw NumericalFailure("no small-denominator point found inside " + p.rects[rect].id.label);
}

int period_of(const TorusAutomorphism& f, const RationalPoint& q, int cap) {
    RationalPoint cur = apply(f, q, 1);
    for (int k = 1; k <= cap; ++k) {
        if (cur.x == q.x && cur.y == q.y) return k;
        cur = apply(f, cur, 1);
    }
    throw RangeError("point is not periodic within " + std::to_string(cap) + " iterates");
}

TorusPoint random_dyadic(std::mt19937_64& rng) {
    const std::int64_t d = std::int64_t(1) << 52;
    return TorusPoint::rational((std::int64_t)(rng() >> 12), (std::int64_t)(rng() >> 12), d);
}

std::vector<TorusPoint> boundary_points(const MarkovPartition& p) {
    std::vector<TorusPoint> out{TorusPoint::rational(0, 0, 1)};
    for (const auto& r : p.rects) {
        const Box b = r.box();
        for (auto u : {b.u0, b.u1})
            for (auto s : {b.s0, b.s1}) out.push_back(TorusPoint::eigen({u, s}));
        for (auto frac : {0.3L, 0.7L}) {
            const long double u = b.u0 + frac * b.width(), s = b.s0 + frac * b.height();
            out.push_back(TorusPoint::eigen({u, b.s0}));  // on a u-side
            out.push_back(TorusPoint::eigen({u, b.s1}));
            out.push_back(TorusPoint::eigen({b.u0, s}));  // on an s-side
            out.push_back(TorusPoint::eigen({b.u1, s}));
        }
    }
    return out;
}

FiberReport fiber_bound_check(const MarkovPartition& p, std::size_t samples, std::uint64_t seed, int window) {
    FiberReport rep;
    rep.window = window;
    rep.samples = samples;
    const int D = p.transition.degree_bound();
    rep.bound = (D + 1) * (D + 1) - 1;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        int size = (int)code_point(p, random_dyadic(rng), window).size();
        rep.max_fiber_random = std::max(rep.max_fiber_random, size);
        if (size == 1) ++rep.uniquely_coded;
        if (size == 0) ++rep.uncoded;
    }
    auto constructed = boundary_points(p);
    rep.boundary_points = constructed.size();
    int max_b = 0;
    for (const auto& x : constructed) {
        int size = (int)code_point(p, x, window).size();
        max_b = std::max(max_b, size);
        if (size >= 2) ++rep.multi_coded_boundary;
        if (size == 0) ++rep.uncoded;
    }
    rep.max_fiber = std::max(rep.max_fiber_random, max_b);
    rep.pass = rep.max_fiber <= rep.bound && rep.uncoded == 0;
    return rep;
}

}  // namespace symdyn
