#pragma once

#include <vector>

#include "json.hpp"
#include "symdyn/measures.hpp"
#include "symdyn/torus_coding.hpp"

namespace symdyn {

// Points base + t e_u, t in [t0, t1]; base is a lift in eigen-coordinates.
struct UnstableArc {
    Vec2 base;
    long double t0 = 0.0L;
    long double t1 = 0.0L;

    long double length() const { return t1 - t0; }
};

struct ArcPiece {
    int rect = 0;
    long double a = 0.0L;  // relative u-interval inside the rectangle's unstable side
    long double b = 0.0L;
};

struct LeafMeasure {
    long double inner = 0.0L;  // cylinders inside the arc
    long double outer = 0.0L;  // cylinders meeting the arc
    long double certified_bound = 0.0L;  // boundary cylinders * e^{-Nh} * max psi
    std::size_t boundary_cylinders = 0;
    std::size_t pieces = 0;
    int depth = 0;

    long double value() const { return (inner + outer) / 2; }
    long double error_bound() const { return certified_bound; }
};

// Splits the arc at rectangle sides. Points on a u-side of two rectangles go
// to the one above (larger s).
std::vector<ArcPiece> decompose_arc(const MarkovPartition& p, const UnstableArc& arc, long double tol = 1e-12L);

// Family built on the partition's transition graph, psi = Perron vector.
ConformalFamily partition_family(const MarkovPartition& p);

LeafMeasure leaf_arc_measure(const ConformalFamily& fam, const MarkovPartition& p, const UnstableArc& arc, int depth);

// Slides the arc along e_s onto the unstable leaf through `target` (a lift).
UnstableArc stable_holonomy(const MarkovPartition& p, const UnstableArc& arc, const Vec2& target);

// f^k of an arc, as an arc of the lifted map.
UnstableArc push_forward(const MarkovPartition& p, const UnstableArc& arc, int k);

struct HolonomyReport {
    long double measure_source = 0.0L;
    long double measure_image = 0.0L;
    long double discrepancy = 0.0L;
    long double combined_bound = 0.0L;
    long double coarse_discrepancy = 0.0L;
    long double coarse_bound = 0.0L;
    std::size_t boundary_cylinders = 0;         // both arcs, fine depth
    std::size_t coarse_boundary_cylinders = 0;  // both arcs, coarse depth
    int depth = 0;
    int coarse_depth = 0;
    bool within_bound = false;
    bool bound_decays = false;  // fine bound <= e^{-(N-Nc)h} * coarse bound
    bool crosses_rectangles = false;
};

HolonomyReport holonomy_invariance_check(const ConformalFamily& fam, const MarkovPartition& p, const UnstableArc& arc,
                                         const Vec2& target, int depth, int coarse_depth);

struct LeafConformality {
    int k = 0;
    long double ratio = 0.0L;
    long double expected = 0.0L;
    long double relative_error = 0.0L;
    long double bound_slack = 0.0L;  // |m_k - e^{kh} m_0| minus the combined bound (<= 0 passes)
    bool pass = false;
};

LeafConformality conformality_on_leaves(const ConformalFamily& fam, const MarkovPartition& p, const UnstableArc& arc,
                                        int k, int depth, double rel_tol = 1e-5);

struct RayTrace {
    std::vector<long double> measured;  // measure of f^{kq}(I0), q = period
    std::vector<long double> formula;   // e^{kqh} * measured[0]
    std::vector<long double> bounds;
    int period = 1;
    double fitted_exponent = 0.0;       // slope of log(measured[k]/measured[0]) per step
};

// direction +1 or -1 selects the half-ray along +e_u or -e_u.
RayTrace periodic_ray_divergence(const ConformalFamily& fam, const MarkovPartition& p, const RationalPoint& fixed,
                                 int direction, int K, int depth);

struct MargulisPoint {
    Vec2 z_lift;      // eigen-coordinates, relative frame of the lifted fixed point
    Vec2 z;           // standard coordinates in [0,1)^2
    long double t = 0.0L;  // unstable offset solving the first condition
    long double r = 0.0L;  // stable offset solving the second condition
    long double consistency = 0.0L;  // max |t - t_x|, |r - r_y|
};

struct MargulisSolver {
    const ConformalFamily& fam_u;
    const MarkovPartition& p;
    const ConformalFamily& fam_s;
    const MarkovPartition& p_inv;
    int depth = 22;
    long double max_length = 64.0L;
};

MargulisPoint margulis_coordinates(const MargulisSolver& solver, const RationalPoint& fixed, long double x,
                                   long double y);

// Signed leaf measure of [base, base + t e_u] (negative for t < 0).
long double signed_unstable_measure(const ConformalFamily& fam, const MarkovPartition& p, const Vec2& base,
                                    long double t, int depth);

struct CylinderImage {
    std::vector<StateId> word;  // c_0 .. c_N
    UnstableArc arc;            // inside c_0's lift
};

// Image of the cylinder [c_0..c_N] on the unstable side of c_0 at relative height `height` in (0,1).
CylinderImage cylinder_image_arc(const MarkovPartition& p, const std::vector<StateId>& word, long double height);

struct StableSegment {
    int rect = 0;
    long double u = 0.0L;  // eigen u-coordinate inside the rectangle's lift
};

StableSegment stable_segment_through(const MarkovPartition& p, int rect, const RationalPoint& q);

// Exact number of lattice translates of the segment meeting f^i(arc).
long long intersection_count(const MarkovPartition& p, const UnstableArc& arc, int i, const StableSegment& seg);

}  // namespace symdyn
