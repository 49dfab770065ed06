#pragma once

#include <vector>

#include "json.hpp"
#include "symdyn/thermo.hpp"

namespace symdyn {

struct ConformalFamily {
    ShiftGraph graph;
    double h = 0.0;
    HarmonicFunction psi;
    long double max_psi = 0.0L;

    long double psi_at(const StateId& s) const { return psi.at(s); }
    long double total_mass(const StateId& root) const { return psi_at(root); }
};

ConformalFamily make_family(const ShiftGraph& g, double h, HarmonicFunction psi);

struct CylinderMeasureValue {
    long double value = 0.0L;
    int depth = 0;
    double error_bound = 0.0;
};

// mu(root; w_1..w_N) = e^{-Nh} psi(w_N); psi(root) for the empty future.
CylinderMeasureValue cylinder_measure(const ConformalFamily& fam, const StateId& root,
                                      const std::vector<StateId>& future);
long double cylinder_probability(const ConformalFamily& fam, const StateId& root, const std::vector<StateId>& future);

struct CheckReport {
    double max_discrepancy = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    BigInt cylinders = 0;
    std::size_t roots = 0;
};

// Compares the measure of every pulled-back cylinder [root, S, c'] (depth <= depth),
// evaluated by summing its refinements at the full depth, against
// e^{-h} times the cylinder formula for c' at root S. The depth-0 entry is the
// total-mass balance psi(root) = e^{-h} sum psi(S).
CheckReport conformality_check(const ConformalFamily& fam, const StateId& root, int depth, double tolerance = 1e-12);

// |mu(c) - sum over one-step refinements| for every cylinder up to depth.
CheckReport consistency_check(const ConformalFamily& fam, const StateId& root, int depth, double tolerance = 1e-12);

// Every cylinder up to depth has strictly positive measure.
bool support_check(const ConformalFamily& fam, const StateId& root, int depth);

CheckReport symbolic_holonomy_check(const ConformalFamily& fam, const StateId& root_a, const StateId& root_b,
                                    int depth);

// A cylinder in a global unstable leaf: the chain must end with `suffix`
// (last symbol = root at time 0) and continue with `future`.
struct LeafCylinder {
    std::vector<StateId> suffix;
    std::vector<StateId> future;
};

struct LeafArc {
    bool whole_leaf = false;  // total mass of every fiber in the leaf
    std::vector<LeafCylinder> cylinders;
};

// trace[m] = sum over chains agreeing with `past` except in the last m symbols
// of the chain's measure of `arc`.
std::vector<long double> global_leaf_measure(const ConformalFamily& fam, const std::vector<StateId>& past,
                                             const LeafArc& arc, int n);

struct RayMass {
    long double formula = 0.0L;   // e^{kLh} psi(a)
    long double summed = 0.0L;    // sum over kL-step paths from a of psi(end), when psi covers them
    bool summed_available = false;
    int loop_length = 0;
};

// `loop` lists the states of a closed path a -> ... -> a without repeating a.
RayMass periodic_ray_mass(const ConformalFamily& fam, const std::vector<StateId>& loop, int k);

struct FamilyReport {
    CheckReport conformality;
    CheckReport consistency;
    bool support_ok = true;
    std::size_t roots_checked = 0;
};

// Runs conformality, consistency and support on every root whose depth
// neighborhood carries psi values.
FamilyReport verify_family(const ConformalFamily& fam, int depth, double tolerance = 1e-12);

}  // namespace symdyn
