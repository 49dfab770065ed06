#pragma once

#include <cstdint>
#include <string>

#include "symdyn/torus_leaf.hpp"

namespace symdyn {

struct RoundTripSummary {
    std::size_t samples = 0;
    std::size_t uniquely_coded = 0;
    long double worst_distance_ratio = 0.0L;  // distance(x, center) / radius, max over codings
    long double max_radius = 0.0L;
    bool pass = false;
};

RoundTripSummary roundtrip_sweep(const MarkovPartition& p, std::size_t samples, int n, std::uint64_t seed);

struct IntersectionSummary {
    std::size_t comparisons = 0;
    std::size_t word_count_cases = 0;  // i >= depth, compared with Z_{i-N}(c_N, omega)
    std::size_t membership_cases = 0;  // i < depth, compared with c_i == omega and position
    std::size_t mismatches = 0;
    std::string first_mismatch;
    bool pass = false;
};

// Every cylinder of depth <= max_depth against every rectangle's stable
// segment, iterates 0..max_i.
IntersectionSummary intersection_sweep(const MarkovPartition& p, int max_depth, int max_i);

struct HolonomySummary {
    std::size_t pairs = 0;
    std::size_t cross_pairs = 0;
    std::size_t within_bound = 0;
    std::size_t bound_decays = 0;
    std::size_t discrepancy_decays = 0;  // fine discrepancy <= e^{-(N-Nc)h} * coarse discrepancy (+ rounding)
    long double max_discrepancy = 0.0L;
    long double max_bound = 0.0L;
    long double max_observed_ratio = 0.0L;  // fine / coarse discrepancy where coarse > 0
    bool pass = false;
};

HolonomySummary holonomy_sweep(const ConformalFamily& fam, const MarkovPartition& p, std::size_t pairs,
                               std::size_t cross_pairs, int depth, int coarse_depth, std::uint64_t seed);

struct LeafConformalitySummary {
    std::size_t checks = 0;
    long double max_relative_error = 0.0L;
    bool pass = false;
};

LeafConformalitySummary leaf_conformality_sweep(const ConformalFamily& fam, const MarkovPartition& p,
                                                std::size_t arcs, int k_max, int depth, std::uint64_t seed,
                                                double rel_tol = 1e-5);

struct LinearitySummary {
    int grid = 0;
    long double max_deviation = 0.0L;
    long double max_consistency = 0.0L;
    bool monotone = false;
    bool pass = false;
};

LinearitySummary pi_p_linearity(const MargulisSolver& solver, const RationalPoint& fixed, int grid,
                                long double range, double tol = 1e-6);

}  // namespace symdyn
