#pragma once

#include <string>
#include <vector>

#include "symdyn/measures.hpp"
#include "symdyn/torus_map.hpp"

namespace symdyn {

struct FixtureInfo {
    std::string name;
    std::string kind;            // "finite", "generated" or "torus"
    StateId base;
    std::vector<StateId> loop;   // a closed path at base, without repeating base
    std::string description;
};

const std::vector<FixtureInfo>& fixtures();
bool is_fixture(const std::string& name);
const FixtureInfo& fixture_info(const std::string& name);  // UnknownFixture if absent

struct UnknownFixture : InvalidInput {
    explicit UnknownFixture(const std::string& name) : InvalidInput("unknown fixture '" + name + "'") {}
};

// max_loop only affects the renewal generator.
ShiftGraph fixture_graph(const std::string& name, int max_loop = 64);

// psi(b) = 1, psi(l(n,k)) = 2^{k-n}, h = log 2.
HarmonicFunction renewal_exact_harmonic(const ShiftGraph& renewal);

// Conformal family for a fixture: Perron vector on finite graphs and the
// cat transition graph, the closed form on renewal, and the ray-based
// construction on the ladder (defined on a ball around (0,1)).
ConformalFamily fixture_family(const std::string& name, int ladder_k_max = 40);

}  // namespace symdyn
