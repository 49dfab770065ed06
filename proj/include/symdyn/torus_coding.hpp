#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "symdyn/torus_map.hpp"

namespace symdyn {

// (x/d, y/d) mod 1, iterated exactly.
struct RationalPoint {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t d = 1;
};

// A torus point: exact rational, or a floating lift given in eigen-coordinates.
struct TorusPoint {
    std::variant<RationalPoint, Vec2> repr;

    static TorusPoint rational(std::int64_t x, std::int64_t y, std::int64_t d);
    static TorusPoint eigen(const Vec2& q) { return TorusPoint{q}; }
};

RationalPoint apply(const TorusAutomorphism& f, const RationalPoint& p, int k);
Vec2 standard_coords(const RationalPoint& p);
// Standard coordinates reduced to [0,1)^2.
Vec2 reduce(const Vec2& standard);
long double torus_distance(const Vec2& a_standard, const Vec2& b_standard);

// Standard coordinates (reduced) of f^k(x) for k = -n..n.
std::vector<Vec2> orbit(const TorusAutomorphism& f, const TorusPoint& x, int n);

// Lifts of a reduced point lying in rectangle boxes: (rectangle, eigen position).
struct Placement {
    int rect = 0;
    Vec2 pos;
};
std::vector<Placement> locate(const MarkovPartition& p, const Vec2& reduced_standard, long double tol);

struct Itinerary {
    int n = 0;
    std::vector<StateId> symbols;  // times -n..n
    Vec2 center;                   // standard coordinates in [0,1)^2
    long double radius = 0.0L;     // every point of the coded set is within radius of center

    const StateId& at(int t) const { return symbols[t + n]; }
};

struct Decoded {
    Vec2 center;       // standard coordinates in [0,1)^2
    Vec2 center_lift;  // eigen-coordinates inside the time-0 rectangle
    Box box;           // the coded set at time 0, eigen-coordinates
    long double radius = 0.0L;
};

std::vector<Itinerary> code_point(const MarkovPartition& p, const TorusPoint& x, int n, long double tol = 1e-12L);
Decoded decode(const MarkovPartition& p, const std::vector<StateId>& symbols, int n);

// Uniformly random admissible itinerary of half-length n.
std::vector<StateId> random_itinerary(const MarkovPartition& p, int n, std::mt19937_64& rng);

// Rational point of small denominator inside rectangle `rect`, away from its
// boundary by `margin` (fraction of each extent). Rational points are periodic.
RationalPoint find_periodic_point(const MarkovPartition& p, int rect, long double margin = 0.05L);
int period_of(const TorusAutomorphism& f, const RationalPoint& q, int cap = 1000000);

struct FiberReport {
    int window = 0;
    std::size_t samples = 0;
    std::size_t boundary_points = 0;
    std::size_t uniquely_coded = 0;      // among random samples
    std::size_t uncoded = 0;             // points no itinerary was found for
    std::size_t multi_coded_boundary = 0;  // constructed points with >= 2 codings
    int max_fiber = 0;
    int max_fiber_random = 0;
    int bound = 0;
    bool pass = false;
};

// Random dyadic samples plus constructed boundary points (rectangle corners,
// points on u- and s-sides, the origin).
FiberReport fiber_bound_check(const MarkovPartition& p, std::size_t samples, std::uint64_t seed, int window = 6);

std::vector<TorusPoint> boundary_points(const MarkovPartition& p);
TorusPoint random_dyadic(std::mt19937_64& rng);

}  // namespace symdyn
