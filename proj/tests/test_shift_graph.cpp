#include <thread>

#include "doctest.h"
#include "oracles.hpp"
#include "symdyn/counting.hpp"
#include "symdyn/fixtures.hpp"

using namespace symdyn;

namespace {

std::set<StateId> ids(std::initializer_list<const char*> labels) {
    std::set<StateId> s;
    for (auto l : labels) s.emplace(l);
    return s;
}

}  // namespace

TEST_CASE("finite spec builds the golden-mean graph") {
    auto g = build_graph(nlohmann::json::parse(R"({"kind":"finite","states":["0","1"],"edges":[["0","0"],["0","1"],["1","0"]]})"));
    CHECK(g.degree_bound() == 2);
    CHECK(g.successors(StateId("0")).size() == 2);
    CHECK(g.successors(StateId("1")) == std::vector<StateId>{StateId("0")});
    CHECK(g.predecessors(StateId("0")).size() == 2);
    CHECK(g.has_finite_closure());
}

TEST_CASE("build_graph rejects bad specs") {
    using nlohmann::json;
    CHECK_THROWS_AS(build_graph(json::parse(R"({"kind":"finite","states":["0","0"],"edges":[]})")), InvalidInput);
    CHECK_THROWS_AS(build_graph(json::parse(R"({"kind":"finite","states":["0"],"edges":[["0","9"]]})")), InvalidInput);
    CHECK_THROWS_AS(build_graph(json::parse(R"({"kind":"generator","name":"nope","params":{}})")), InvalidInput);
    CHECK_THROWS_AS(build_graph(json::parse(R"({"kind":"weird"})")), InvalidInput);
    auto r = build_graph(json::parse(R"({"kind":"generator","name":"renewal","params":{"max_loop":5}})"));
    CHECK(r.base() == StateId("b"));
    auto f = build_graph(json::parse(R"({"kind":"generator","name":"full","params":{"k":3}})"));
    CHECK(f.successors(StateId("2")).size() == 3);
}

TEST_CASE("renewal generator edges") {
    auto g = make_renewal(8);
    const auto& sb = g.successors(StateId("b"));
    CHECK(sb.front() == StateId("b"));
    CHECK(sb.size() == 8);  // b and l(n,1) for n = 2..8
    CHECK(g.successors(StateId("l(2,1)")) == std::vector<StateId>{StateId("b")});
    CHECK(g.successors(StateId("l(5,3)")) == std::vector<StateId>{StateId("l(5,4)")});
    CHECK(g.successors(StateId("l(5,4)")) == std::vector<StateId>{StateId("b")});
    CHECK_FALSE(g.contains(StateId("l(9,1)")));
    CHECK_FALSE(g.contains(StateId("l(3,3)")));
    CHECK_THROWS_AS(g.require(StateId("zz")), UnknownState);
    // simple loop of n edges through l(n,1..n-1)
    for (int n = 2; n <= 8; ++n) {
        std::vector<StateId> loop{StateId("b")};
        for (int k = 1; k < n; ++k) loop.emplace_back(renewal_label(n, k));
        loop.emplace_back("b");
        CHECK(is_admissible(g, loop));
    }
}

TEST_CASE("successor and predecessor functions agree") {
    for (auto g : {make_renewal(8), make_full_shift(3), fixture_graph("golden-mean"), fixture_graph("cat")}) {
        for (const auto& s : g.all_states()) {
            for (const auto& t : g.successors(s)) {
                const auto& pr = g.predecessors(t);
                CHECK(std::count(pr.begin(), pr.end(), s) == 1);
            }
            for (const auto& t : g.predecessors(s)) CHECK(g.has_edge(t, s));
        }
    }
    auto lad = make_ladder();
    for (const auto& s : ball(lad, StateId("(0,1)"), 5)) {
        for (const auto& t : lad.successors(s)) CHECK(lad.has_edge(s, t));
        for (const auto& t : lad.predecessors(s)) {
            const auto& su = lad.successors(t);
            CHECK(std::count(su.begin(), su.end(), s) == 1);
        }
    }
}

TEST_CASE("ladder neighbourhoods by hand") {
    auto g = make_ladder();
    CHECK(g.successors(StateId("(0,1)")) == std::vector<StateId>{StateId("(1,1)"), StateId("(1,2)")});
    auto s22 = g.successors(StateId("(2,2)"));
    CHECK(std::set<StateId>(s22.begin(), s22.end()) == ids({"(3,1)", "(3,2)", "(1,1)"}));
    CHECK(g.predecessors(StateId("(0,2)")).empty());
    CHECK(ball(g, StateId("(0,1)"), 1) == ids({"(0,1)", "(1,1)", "(1,2)"}));
    CHECK(ball(g, StateId("(0,1)"), 3) ==
          ids({"(0,1)", "(0,2)", "(1,1)", "(1,2)", "(2,1)", "(2,2)", "(3,1)", "(3,2)"}));
}

TEST_CASE("ball examples") {
    CHECK(ball(fixture_graph("golden-mean"), StateId("0"), 0) == ids({"0"}));
    CHECK_THROWS_AS(ball(fixture_graph("golden-mean"), StateId("7"), 1), UnknownState);
    // Renewal with loops up to 6: everything within two edges of b in either
    // direction, which leaves out only the middle state of the 6-loop.
    auto g = make_renewal(6);
    auto all = g.all_states();
    std::set<StateId> expect(all.begin(), all.end());
    expect.erase(StateId("l(6,3)"));
    CHECK(ball(g, StateId("b"), 2) == expect);
}

TEST_CASE("balls are monotone and deterministic") {
    for (const auto& f : fixtures()) {
        auto g = fixture_graph(f.name, 12);
        std::set<StateId> prev;
        for (int r = 0; r <= 6; ++r) {
            auto b = ball(g, f.base, r);
            CHECK(std::includes(b.begin(), b.end(), prev.begin(), prev.end()));
            CHECK(b == ball(g, f.base, r));
            prev = b;
        }
    }
}

TEST_CASE("explore orders states by distance") {
    auto g = make_ladder();
    auto lg = explore(g, {StateId("(0,1)")}, 4, Direction::forward);
    for (std::size_t i = 1; i < lg.size(); ++i) CHECK(lg.distance[i - 1] <= lg.distance[i]);
    CHECK(lg.states.front() == StateId("(0,1)"));
}

TEST_CASE("validate_graph") {
    auto gm = validate_graph(fixture_graph("golden-mean"), 3);
    CHECK(gm.transitive_on_ball);
    CHECK(gm.max_out_degree == 2);
    CHECK(gm.max_in_degree == 2);
    auto f2 = validate_graph(fixture_graph("full-2"), 3);
    CHECK(f2.transitive_on_ball);
    CHECK(f2.max_out_degree == 2);
    auto one = ShiftGraph::finite({StateId("0"), StateId("1")}, {{StateId("0"), StateId("1")}});
    CHECK_FALSE(validate_graph(one, 2).transitive_on_ball);
    CHECK(validate_graph(make_renewal(10), 3).transitive_on_ball);
    CHECK(validate_graph(fixture_graph("cat"), 5).max_out_degree == 3);
}

TEST_CASE("degree bound violation is reported with the state") {
    ShiftGraph::GeneratorDef def;
    def.name = "liar";
    def.base = StateId("x");
    def.degree_bound = 1;
    def.valid = [](const StateId& s) { return s.label == "x" || s.label == "y"; };
    def.successors = [](const StateId&) { return std::vector<StateId>{StateId("x"), StateId("y")}; };
    def.predecessors = [](const StateId&) { return std::vector<StateId>{StateId("x"), StateId("y")}; };
    auto g = ShiftGraph::generated(def);
    try {
        validate_graph(g, 1);
        FAIL("expected a structural violation");
    } catch (const StructuralViolation& e) {
        CHECK(std::string(e.what()).find("'x'") != std::string::npos);
    }
    CHECK_THROWS(ShiftGraph::finite({StateId("0"), StateId("1")},
                                    {{StateId("0"), StateId("0")}, {StateId("0"), StateId("1")}}, std::nullopt, 1));
}

TEST_CASE("is_admissible examples") {
    auto gm = fixture_graph("golden-mean");
    CHECK(is_admissible(gm, {StateId("0"), StateId("1"), StateId("0")}));
    CHECK_FALSE(is_admissible(gm, {StateId("1"), StateId("1")}));
    CHECK_THROWS_AS(is_admissible(gm, {StateId("0"), StateId("5")}), UnknownState);
    CHECK_THROWS_AS(is_admissible(gm, {}), InvalidInput);
    auto f2 = fixture_graph("full-2");
    for (auto a : {"0", "1"})
        for (auto b : {"0", "1"}) CHECK(is_admissible(f2, {StateId(a), StateId(b)}));
}

TEST_CASE("admissibility agrees with count support on finite fixtures") {
    for (auto name : {"golden-mean", "full-2", "three-cycle"}) {
        auto g = fixture_graph(name);
        auto states = g.all_states();
        for (int n = 1; n <= 6; ++n) {
            for (const auto& a : states)
                for (const auto& b : states) {
                    bool exists = false;
                    for (auto mid : oracle::all_sequences(states, n - 1)) {
                        std::vector<StateId> w{a};
                        w.insert(w.end(), mid.begin(), mid.end());
                        w.push_back(b);
                        exists = exists || is_admissible(g, w);
                    }
                    CHECK(exists == !count_words(g, a, b, n).counts[n].is_zero());
                }
        }
    }
}

TEST_CASE("state lists respect parentheses") {
    auto v = parse_state_list("(0,1),(1,2), b ,l(3,2)");
    REQUIRE(v.size() == 4);
    CHECK(v[0] == StateId("(0,1)"));
    CHECK(v[2] == StateId("b"));
    CHECK(v[3] == StateId("l(3,2)"));
    CHECK(join_states(v) == "(0,1),(1,2),b,l(3,2)");
}

TEST_CASE("memoized generators are deterministic under concurrent use") {
    auto g = make_renewal(40);
    auto ref = ball(make_renewal(40), StateId("b"), 6);
    std::vector<std::set<StateId>> got(4);
    std::vector<std::thread> ts;
    for (int i = 0; i < 4; ++i) ts.emplace_back([&, i] { got[i] = ball(g, StateId("b"), 6); });
    for (auto& t : ts) t.join();
    for (const auto& b : got) CHECK(b == ref);
}
