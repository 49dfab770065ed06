#include "symdyn/fixtures.hpp"

#include <cmath>

#include "symdyn/torus_leaf.hpp"

namespace symdyn {

const std::vector<FixtureInfo>& fixtures() {
    static const std::vector<FixtureInfo> list = {
        {"golden-mean", "finite", StateId("1"), {StateId("1"), StateId("0")}, "states 0,1; no edge 1->1"},
        {"full-2", "finite", StateId("0"), {StateId("0")}, "full shift on two symbols"},
        {"three-cycle", "finite", StateId("0"), {StateId("0"), StateId("1"), StateId("2")}, "single cycle 0->1->2->0"},
        {"renewal", "generated", StateId("b"), {StateId("b")}, "self-loop at b plus one simple loop of each length"},
        {"ladder", "generated", StateId("(0,1)"), {StateId("(0,1)"), StateId("(1,1)")}, "two-colored ladder, null recurrent"},
        {"cat", "torus", StateId("P1"), {StateId("P1"), StateId("P2"), StateId("Q2")}, "cat map [[2,1],[1,1]], five-rectangle partition"},
    };
    return list;
}

bool is_fixture(const std::string& name) {
    for (const auto& f : fixtures())
        if (f.name == name) return true;
    return false;
}

const FixtureInfo& fixture_info(const std::string& name) {
    for (const auto& f : fixtures())
        if (f.name == name) return f;
    throw UnknownFixture(name);
}

ShiftGraph fixture_graph(const std::string& name, int max_loop) {
    const auto& info = fixture_info(name);
    if (name == "golden-mean")
        return ShiftGraph::finite({StateId("0"), StateId("1")},
                                  {{StateId("0"), StateId("0")}, {StateId("0"), StateId("1")}, {StateId("1"), StateId("0")}},
                                  info.base);
    if (name == "full-2") return make_full_shift(2);
    if (name == "three-cycle")
        return ShiftGraph::finite({StateId("0"), StateId("1"), StateId("2")},
                                  {{StateId("0"), StateId("1")}, {StateId("1"), StateId("2")}, {StateId("2"), StateId("0")}},
                                  info.base);
    if (name == "renewal") return make_renewal(max_loop);
    if (name == "ladder") return make_ladder();
    return builtin_partition("cat-adler-weiss").transition;
}

HarmonicFunction renewal_exact_harmonic(const ShiftGraph& renewal) {
    HarmonicFunction hf;
    hf.method = HarmonicMethod::eigen;
    hf.h = std::log(2.0);
    hf.base = StateId("b");
    for (const auto& s : renewal.all_states()) {
        if (s.label == "b") {
            hf.values[s] = 1.0L;
            continue;
        }
        int n = 0, k = 0;
        std::sscanf(s.label.c_str(), "l(%d,%d)", &n, &k);
        hf.values[s] = std::ldexp(1.0L, k - n);
    }
    hf.residual = harmonic_residual(renewal, hf.values, hf.h);
    hf.diagnostics = {{"closed_form", "psi(l(n,k)) = 2^(k-n)"}};
    return hf;
}

ConformalFamily fixture_family(const std::string& name, int ladder_k_max) {
    fixture_info(name);
    if (name == "cat") return partition_family(builtin_partition("cat-adler-weiss"));
    ShiftGraph g = fixture_graph(name);
    if (name == "renewal") {
        auto psi = renewal_exact_harmonic(g);
        return make_family(g, psi.h, psi);
    }
    if (name == "ladder") {
        const double h = 1.5 * std::log(2.0);
        auto psi = harmonic_cyr(g, StateId("(0,1)"), ladder_ray(1, ladder_k_max + 1), h, ladder_k_max);
        return make_family(g, h, psi);
    }
    auto psi = harmonic_finite(g);
    return make_family(g, psi.h, psi);
}

}  // namespace symdyn
