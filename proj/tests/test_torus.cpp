#include <cmath>
#include <random>

#include "doctest.h"
#include "symdyn/counting.hpp"
#include "symdyn/fixtures.hpp"
#include "symdyn/torus_checks.hpp"

using namespace symdyn;

namespace {

const MarkovPartition& cat() {
    static const MarkovPartition p = builtin_partition("cat-adler-weiss");
    return p;
}

const ConformalFamily& cat_family() {
    static const ConformalFamily fam = partition_family(cat());
    return fam;
}

bool has_kind(const PartitionReport& r, const std::string& kind) {
    for (const auto& v : r.violations)
        if (v.kind == kind) return true;
    return false;
}

}  // namespace

TEST_CASE("automorphism construction") {
    auto f = make_automorphism({{{2, 1}, {1, 1}}});
    const long double lam = (3 + std::sqrt(5.0L)) / 2;
    CHECK(std::fabs(f.lambda_u - lam) < 1e-15L);
    CHECK(std::fabs(f.lambda_u * f.lambda_s - 1) < 1e-15L);
    // f e_u = lambda_u e_u in standard coordinates
    const Vec2 fe{2 * f.e_u.x + f.e_u.y, f.e_u.x + f.e_u.y};
    CHECK(std::fabs(fe.x - lam * f.e_u.x) < 1e-15L);
    CHECK(std::fabs(fe.y - lam * f.e_u.y) < 1e-15L);
    CHECK(std::fabs(f.e_u.norm() - 1) < 1e-15L);
    CHECK(f.basis_det() > 0);
    const Vec2 p{0.3L, 0.7L};
    const Vec2 back = f.from_eigen(f.to_eigen(p));
    CHECK(std::fabs(back.x - p.x) + std::fabs(back.y - p.y) < 1e-15L);

    CHECK_THROWS_AS(make_automorphism({{{2, 0}, {0, 1}}}), InvalidInput);  // det 2
    CHECK_THROWS_AS(make_automorphism({{{1, 1}, {0, 1}}}), InvalidInput);  // parabolic
    auto g = invert(f);
    CHECK(std::fabs(g.lambda_u - lam) < 1e-15L);
}

TEST_CASE("built-in cat partition is a Markov partition") {
    const auto& p = cat();
    auto rep = validate_partition(p, 1e-9L);
    CHECK(rep.pass);
    CHECK(rep.violations.empty());
    CHECK(std::fabs(rep.total_area - 1) < 1e-12L);
    CHECK(std::fabs(rep.spectral_radius - p.map.lambda_u) < 1e-9L);
    CHECK(p.rects.size() == 5);
    CHECK(p.transitions.size() == 13);
    CHECK(p.transition.degree_bound() == 3);
    CHECK(validate_partition(inverse_partition(p), 1e-9L).pass);
    const double lam = (3 + std::sqrt(5.0)) / 2;
    CHECK(std::fabs(gurevich_entropy(p.transition, StateId("P1"), 40).value - std::log(lam)) < 1e-6);
}

TEST_CASE("validate_partition names its violations") {
    const auto& p = cat();
    auto rects = p.rects;
    rects[0].u_extent *= 0.99L;
    rects[0].s_extent *= 0.99L;
    auto shrunk = make_partition("shrunk", p.map, rects);
    auto rep = validate_partition(shrunk, 1e-9L);
    CHECK_FALSE(rep.pass);
    CHECK(has_kind(rep, "cover"));

    // One rectangle of area 1 overlaps its own lattice translates.
    const long double side = 1.0L;
    auto whole = make_partition("whole", p.map, {Rectangle{StateId("T"), {0, 0}, side, side}});
    auto wr = validate_partition(whole, 1e-9L);
    CHECK_FALSE(wr.pass);
    CHECK(has_kind(wr, "self-overlap"));
}

TEST_CASE("partition JSON round trip") {
    auto j = partition_to_json(cat());
    CHECK(j["matrix"] == nlohmann::json::parse("[[2,1],[1,1]]"));
    auto q = partition_from_json(j);
    CHECK(validate_partition(q, 1e-9L).pass);
    REQUIRE(q.transitions.size() == cat().transitions.size());
    for (std::size_t i = 0; i < q.transitions.size(); ++i) {
        CHECK(q.transitions[i].from == cat().transitions[i].from);
        CHECK(q.transitions[i].to == cat().transitions[i].to);
        CHECK(q.transitions[i].offset == cat().transitions[i].offset);
    }
    CHECK_THROWS_AS(partition_from_json(nlohmann::json::parse(R"({"matrix":[[1,0],[0,1]],"rectangles":[]})")), InvalidInput);
}

TEST_CASE("coding and decoding") {
    const auto& p = cat();
    auto rt = roundtrip_sweep(p, 1000, 20, 7);
    CHECK(rt.pass);
    CHECK(rt.uniquely_coded >= 990);
    CHECK(rt.max_radius < 1e-7L);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        auto word = random_itinerary(p, 12, rng);
        CHECK(is_admissible(p.transition, word));
        auto d = decode(p, word, 12);
        CHECK(d.radius < 1e-4L);
        bool found = false;
        for (const auto& it : code_point(p, TorusPoint::eigen(d.center_lift), 12))
            found = found || it.symbols == word;
        CHECK(found);
    }
    CHECK_THROWS(decode(p, {StateId("Q2"), StateId("Q1"), StateId("P1")}, 1));
}

TEST_CASE("the origin sits on the boundary of several rectangles") {
    auto codes = code_point(cat(), TorusPoint::rational(0, 0, 1), 4);
    CHECK(codes.size() >= 2);
}

TEST_CASE("rational points are periodic") {
    for (int r = 0; r < 5; ++r) {
        auto q = find_periodic_point(cat(), r);
        const int per = period_of(cat().map, q);
        CHECK(per >= 1);
        CHECK(apply(cat().map, q, per).x == q.x);
        CHECK(apply(cat().map, q, per).y == q.y);
    }
}

TEST_CASE("fiber bound") {
    auto rep = fiber_bound_check(cat(), 2000, 3);
    CHECK(rep.pass);
    CHECK(rep.bound == 15);
    CHECK(rep.max_fiber <= 15);
    CHECK(rep.uncoded == 0);
    CHECK(rep.multi_coded_boundary == rep.boundary_points);
}

TEST_CASE("leaf measures of whole sides and cylinder images") {
    const auto& p = cat();
    const auto& fam = cat_family();
    for (int r = 0; r < 5; ++r) {
        const Box b = p.rects[r].box();
        UnstableArc side{{b.u0, (b.s0 + b.s1) / 2}, 0.0L, b.width()};
        for (int depth : {0, 3, 8}) {
            auto m = leaf_arc_measure(fam, p, side, depth);
            CHECK(std::fabs(m.value() - fam.psi_at(p.rects[r].id)) < 1e-12L);
        }
    }
    auto ci = cylinder_image_arc(p, {StateId("P1"), StateId("P2"), StateId("Q1"), StateId("Q2")}, 0.4L);
    auto m = leaf_arc_measure(fam, p, ci.arc, 10);
    const long double expect = std::exp(-3 * fam.h) * fam.psi_at(StateId("Q2"));
    CHECK(std::fabs(m.value() - expect) < 1e-12L);
}

TEST_CASE("intersection counts match word counts for depth <= 2") {
    auto s = intersection_sweep(cat(), 2, 9);
    CHECK(s.pass);
    CHECK(s.mismatches == 0);
    CHECK(s.word_count_cases > 0);
    CHECK(s.membership_cases > 0);
}

TEST_CASE("intersection counts for one cylinder by hand") {
    const auto& p = cat();
    auto ci = cylinder_image_arc(p, {StateId("P1"), StateId("P2"), StateId("Q1"), StateId("Q2")}, 0.5L);
    const int q1 = p.index_of(StateId("Q1"));
    auto seg = stable_segment_through(p, q1, find_periodic_point(p, q1));
    const std::vector<long long> expect{0, 0, 1, 0, 0, 1, 3, 8, 21};
    auto z = count_words(p.transition, StateId("Q2"), StateId("Q1"), 5);
    for (int i = 0; i <= 8; ++i) {
        CHECK(intersection_count(p, ci.arc, i, seg) == expect[i]);
        if (i >= 3) CHECK(z.counts[i - 3] == expect[i]);
    }
}

TEST_CASE("stable holonomy preserves leaf measure within the certified bound") {
    const auto& p = cat();
    const auto& fam = cat_family();
    const Box b = p.rects[0].box();
    UnstableArc arc{{b.u0, b.s0 + 0.3L * b.height()}, 0.1L * b.width(), 0.8L * b.width()};
    auto same = holonomy_invariance_check(fam, p, arc, {b.u0, b.s0 + 0.7L * b.height()}, 12, 6);
    CHECK(same.within_bound);
    CHECK(same.bound_decays);
    CHECK_FALSE(same.crosses_rectangles);
    auto cross = holonomy_invariance_check(fam, p, arc, {b.u0, b.s1 + 0.2L * b.height()}, 12, 6);
    CHECK(cross.crosses_rectangles);
    CHECK(cross.within_bound);
    CHECK(cross.discrepancy <= cross.combined_bound);

    auto sweep = holonomy_sweep(fam, p, 30, 10, 10, 5, 5);
    CHECK(sweep.pass);
}

TEST_CASE("leaf measures scale by e^{kh} under the map") {
    auto s = leaf_conformality_sweep(cat_family(), cat(), 4, 5, 18, 9);
    CHECK(s.pass);
    CHECK(s.max_relative_error < 1e-5L);
    const Box b = cat().rects[2].box();
    auto one = conformality_on_leaves(cat_family(), cat(), {{b.u0, b.s0 + 0.5L * b.height()}, 0.2L, 0.9L}, 3, 18);
    CHECK(one.pass);
    CHECK(std::fabs(one.expected - std::exp(3 * cat_family().h)) < 1e-12L);
}

TEST_CASE("periodic ray divergence at the fixed point") {
    auto tr = periodic_ray_divergence(cat_family(), cat(), RationalPoint{0, 0, 1}, 1, 8, 16);
    CHECK(tr.period == 1);
    CHECK(tr.measured.back() > 1e3L * tr.measured.front());
    CHECK(std::fabs(tr.fitted_exponent - cat_family().h) < 1e-6);
    for (std::size_t k = 0; k < tr.formula.size(); ++k)
        CHECK(std::fabs(tr.formula[k] - std::exp((long double)k * cat_family().h) * tr.measured[0]) < 1e-9L * tr.formula[k]);
    auto back = periodic_ray_divergence(cat_family(), cat(), RationalPoint{0, 0, 1}, -1, 4, 16);
    CHECK(back.measured.back() > 40 * back.measured.front());
    CHECK(std::fabs(back.fitted_exponent - cat_family().h) < 1e-6);
    CHECK_THROWS_AS(periodic_ray_divergence(cat_family(), cat(), RationalPoint{0, 0, 1}, 0, 4, 16), InvalidInput);
}

TEST_CASE("Margulis coordinates") {
    static const MarkovPartition inv = inverse_partition(cat());
    static const ConformalFamily fam_s = partition_family(inv);
    MargulisSolver solver{cat_family(), cat(), fam_s, inv};
    auto z0 = margulis_coordinates(solver, RationalPoint{0, 0, 1}, 0, 0);
    CHECK(std::fabs(z0.t) < 1e-12L);
    CHECK(std::fabs(z0.r) < 1e-12L);
    auto z = margulis_coordinates(solver, RationalPoint{0, 0, 1}, 0.5L, -0.25L);
    CHECK(z.consistency < 1e-8L);
    CHECK(z.t > 0);
    CHECK(z.r < 0);
    auto lin = pi_p_linearity(solver, RationalPoint{0, 0, 1}, 6, 1.0L);
    CHECK(lin.pass);
    CHECK(lin.monotone);
    MargulisSolver tight{cat_family(), cat(), fam_s, inv, 18, 1.0L};
    CHECK_THROWS_AS(margulis_coordinates(tight, RationalPoint{0, 0, 1}, 50.0L, 0), RangeError);
}

TEST_CASE("coding radius shrinks like lambda_u^{-n}") {
    std::mt19937_64 rng(21);
    const long double lam = cat().map.lambda_u;
    for (int i = 0; i < 40; ++i) {
        const TorusPoint x = random_dyadic(rng);
        const Vec2 xs = standard_coords(std::get<RationalPoint>(x.repr));
        for (int n : {4, 8, 12, 16, 20}) {
            for (const auto& it : code_point(cat(), x, n)) {
                CHECK(torus_distance(xs, it.center) <= it.radius + 1e-15L);
                CHECK(it.radius * std::pow(lam, (long double)n) < 4.0L);
            }
        }
    }
}
