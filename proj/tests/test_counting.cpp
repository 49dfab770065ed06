#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "symdyn/counting.hpp"
#include "symdyn/fixtures.hpp"

using namespace symdyn;

namespace {

// A few origins per fixture, including states away from the base.
std::vector<StateId> origins(const std::string& name) {
    if (name == "renewal") return {StateId("b"), StateId("l(4,2)")};
    if (name == "ladder") return {StateId("(0,1)"), StateId("(2,2)")};
    if (name == "cat") return {StateId("P1"), StateId("Q2")};
    return fixture_graph(name).all_states();
}

}  // namespace

TEST_CASE("count_words equals brute-force enumeration for n <= 12 on every fixture") {
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name);
        for (const auto& a : origins(f.name)) {
            auto brute = oracle::enumerate_words(g, a, 12);
            std::set<StateId> targets;
            for (const auto& layer : brute)
                for (const auto& [t, c] : layer) targets.insert(t);
            targets.insert(f.base);
            for (const auto& b : targets) {
                auto table = count_words(g, a, b, 12);
                REQUIRE(table.counts.size() == 13);
                for (int n = 0; n <= 12; ++n) {
                    auto it = brute[n].find(b);
                    const std::uint64_t expect = it == brute[n].end() ? 0 : it->second;
                    CHECK_MESSAGE(table.counts[n] == expect, f.name << " " << a.label << "->" << b.label << " n=" << n);
                }
            }
        }
    }
}

TEST_CASE("count examples") {
    auto f2 = fixture_graph("full-2");
    auto t = count_words(f2, StateId("0"), StateId("0"), 3);
    CHECK(t.counts == std::vector<BigInt>{1, 1, 2, 4});
    auto gm = fixture_graph("golden-mean");
    auto fib = count_words(gm, StateId("0"), StateId("0"), 10);
    std::vector<BigInt> expect{1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
    CHECK(fib.counts == expect);
    CHECK(count_words(gm, StateId("1"), StateId("0"), 0).counts[0] == 0);
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name);
        CHECK(count_words(g, f.base, f.base, 0).counts[0] == 1);
    }
    CHECK_THROWS_AS(count_words(gm, StateId("0"), StateId("x"), 2), UnknownState);
}

TEST_CASE("counts beyond 64 bits stay exact") {
    auto t = count_periodic(fixture_graph("full-2"), StateId("0"), 70);
    CHECK(t.counts[70].str() == "590295810358705651712");  // 2^69
    auto cat = count_periodic(fixture_graph("cat"), StateId("P1"), 100);
    CHECK(cat.counts[100] > BigInt(std::numeric_limits<std::uint64_t>::max()));
}

TEST_CASE("target outside the reachable ball gives zeros") {
    auto g = make_ladder();
    auto t = count_words(g, StateId("(0,1)"), StateId("(9,2)"), 5);
    for (const auto& c : t.counts) CHECK(c == 0);
}

TEST_CASE("periodic counts") {
    auto f2 = count_periodic(fixture_graph("full-2"), StateId("0"), 5);
    CHECK(f2.counts[2] == 2);
    CHECK(f2.counts[3] == 4);
    CHECK(f2.counts[5] == 16);
    CHECK(f2.counts[5] >= f2.counts[2] * f2.counts[3]);
    auto gm = count_periodic(fixture_graph("golden-mean"), StateId("0"), 2);
    CHECK(gm.counts[1] == 1);
    CHECK(gm.counts[2] == 2);
    auto r = count_periodic(make_renewal(64), StateId("b"), 40);
    for (int n = 1; n <= 40; ++n) CHECK(r.counts[n] >= 1);
}

TEST_CASE("counts are bounded by degree_bound^n") {
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name, 16);
        auto t = count_periodic(g, f.base, 16);
        BigInt pw = 1;
        for (int n = 0; n <= 16; ++n) {
            CHECK(t.counts[n] <= pw);
            pw *= g.degree_bound();
        }
    }
}

TEST_CASE("Chapman-Kolmogorov: Z_{n+m}(a,c) = sum_b Z_n(a,b) Z_m(b,c)") {
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name, 16);
        const int n = 5, m = 4;
        auto from = counts_from(g, f.base, n);
        for (const auto& c : ball(g, f.base, 3)) {
            BigInt sum = 0;
            for (std::size_t i = 0; i < from.region.size(); ++i) {
                if (from.by_step[n][i].is_zero()) continue;
                sum += from.by_step[n][i] * count_words(g, from.region.states[i], c, m).counts[m];
            }
            CHECK_MESSAGE(sum == count_words(g, f.base, c, n + m).counts[n + m], f.name << " -> " << c.label);
        }
    }
}

TEST_CASE("counts_to agrees with counts_from") {
    auto g = fixture_graph("cat");
    auto to = counts_to(g, StateId("Q1"), 8);
    for (std::size_t i = 0; i < to.region.size(); ++i)
        CHECK(to.by_step[8][i] == count_words(g, to.region.states[i], StateId("Q1"), 8).counts[8]);
}

TEST_CASE("superadditivity of periodic counts for n, m <= 20") {
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name);
        auto p = count_periodic(g, f.base, 40);
        for (int n = 1; n <= 20; ++n)
            for (int m = 1; m <= 20; ++m) CHECK(p.counts[n + m] >= p.counts[n] * p.counts[m]);
    }
}

TEST_CASE("weighted loop sums") {
    auto r = weighted_loop_sum(make_renewal(64), StateId("b"), std::log(2.0), 30);
    CHECK(r.partial_sums[30] > 15);
    // Z_n(b,b) = 2^{n-1}, so each term is exactly 1/2.
    for (int n = 1; n <= 30; ++n) CHECK(r.terms[n] == doctest::Approx(0.5).epsilon(1e-15));

    auto l = weighted_loop_sum(make_ladder(), StateId("(0,1)"), 1.5 * std::log(2.0), 40);
    for (std::size_t n = 1; n < l.partial_sums.size(); ++n) CHECK(l.partial_sums[n] >= l.partial_sums[n - 1]);
    CHECK(l.partial_sums[40] < 2.0);
    CHECK(l.partial_sums[40] > 1.7);

    auto z = weighted_loop_sum(fixture_graph("golden-mean"), StateId("0"), 0.5, 0);
    CHECK(z.partial_sums == std::vector<long double>{1.0L});
    CHECK_THROWS_AS(weighted_loop_sum(fixture_graph("golden-mean"), StateId("0"), 0.0, 5), InvalidInput);
}

TEST_CASE("partial sums are nondecreasing on every fixture") {
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name);
        auto t = weighted_loop_sum(g, f.base, 0.7, 30);
        for (std::size_t n = 1; n < t.partial_sums.size(); ++n) CHECK(t.partial_sums[n] >= t.partial_sums[n - 1]);
    }
}

TEST_CASE("weighted_term handles counts far beyond double range") {
    BigInt z = 1;
    z <<= 2000;
    const long double t = weighted_term(z, 2000, std::log(2.0));
    CHECK(static_cast<double>(t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("compensated summation") {
    CompensatedSum s;
    s.add(1.0L);
    for (int i = 0; i < 10000; ++i) s.add(1e-20L);
    s.add(-1.0L);
    CHECK(static_cast<double>(s.value()) == doctest::Approx(1e-16).epsilon(1e-9));
}
