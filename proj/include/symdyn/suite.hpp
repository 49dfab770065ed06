#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "symdyn/report.hpp"
#include "symdyn/torus_map.hpp"

namespace symdyn {

struct SuiteConfig {
    int n_max = 60;
    int depth = 12;             // leaf-measure depth for holonomy; the coarse depth is depth/2
    int measure_depth = 8;      // cylinder depth for the symbolic conformality checks
    std::uint64_t seed = 7;
    double tol = 1e-9;          // partition validation tolerance
    std::size_t samples = 10000;
};

// Partial-sum traces collected while running, keyed "fixture/what".
using TraceMap = std::map<std::string, std::vector<long double>>;

// fixture is a registered name or "all". Throws UnknownFixture.
Report run_suite(const std::string& fixture, const SuiteConfig& cfg, TraceMap* traces = nullptr);

// The torus block alone, as used by `torus verify`.
void run_torus_checks(Report& r, const std::string& prefix, const MarkovPartition& p, const SuiteConfig& cfg);

}  // namespace symdyn
