#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdyn/shift_graph.hpp"

namespace symdyn {

// Points and vectors in the plane. In eigen-coordinates x is the unstable
// coordinate u and y the stable coordinate s.
struct Vec2 {
    long double x = 0.0L;
    long double y = 0.0L;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(long double k) const { return {x * k, y * k}; }
    long double norm() const { return std::sqrt(x * x + y * y); }
};

using IntVec = std::array<long long, 2>;
using IntMat = std::array<std::array<long long, 2>, 2>;

struct TorusAutomorphism {
    IntMat matrix{};
    long double lambda_u = 0.0L;
    long double lambda_s = 0.0L;
    Vec2 e_u;  // standard coordinates
    Vec2 e_s;

    long long det() const { return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]; }
    long long trace() const { return matrix[0][0] + matrix[1][1]; }

    Vec2 to_eigen(const Vec2& p) const;
    Vec2 from_eigen(const Vec2& q) const;
    Vec2 lattice_eigen(const IntVec& v) const { return to_eigen({(long double)v[0], (long double)v[1]}); }
    // f in eigen-coordinates: (u, s) -> (lambda_u u, lambda_s s).
    Vec2 apply_eigen(const Vec2& q) const { return {lambda_u * q.x, lambda_s * q.y}; }
    Vec2 apply_eigen(const Vec2& q, int k) const {
        return {std::pow(lambda_u, (long double)k) * q.x, std::pow(lambda_s, (long double)k) * q.y};
    }
    IntVec apply(const IntVec& v) const;
    IntVec apply_inverse(const IntVec& v) const;
    IntMat inverse_matrix() const;
    // Largest stretch of the eigen -> standard change of basis.
    long double basis_norm() const;
    long double basis_det() const { return e_u.x * e_s.y - e_u.y * e_s.x; }
};

TorusAutomorphism make_automorphism(const IntMat& m);
// f^{-1}, with unstable and stable roles exchanged (e_u' = e_s, e_s' = e_u).
TorusAutomorphism invert(const TorusAutomorphism& f);

struct Box {
    long double u0 = 0, u1 = 0, s0 = 0, s1 = 0;

    long double width() const { return u1 - u0; }
    long double height() const { return s1 - s0; }
    Box shifted(const Vec2& d) const { return {u0 + d.x, u1 + d.x, s0 + d.y, s1 + d.y}; }
    bool contains(const Vec2& p, long double tol) const {
        return p.x >= u0 - tol && p.x <= u1 + tol && p.y >= s0 - tol && p.y <= s1 + tol;
    }
};

// Image of a box under the diagonal map.
Box apply_box(const TorusAutomorphism& f, const Box& b);

struct Rectangle {
    StateId id;
    Vec2 corner;  // (min u, min s) of a lift, eigen-coordinates
    long double u_extent = 0.0L;
    long double s_extent = 0.0L;

    Box box() const { return {corner.x, corner.x + u_extent, corner.y, corner.y + s_extent}; }
};

// f(R_from) meets R_to + offset (offset in standard lattice coordinates).
struct Transition {
    int from = 0;
    int to = 0;
    IntVec offset{};
};

struct MarkovPartition {
    std::string name;
    TorusAutomorphism map;
    std::vector<Rectangle> rects;
    std::vector<Transition> transitions;
    ShiftGraph transition = make_full_shift(1);
    int lattice_radius = 0;  // translate bound used for point location

    int index_of(const StateId& id) const;
    const Transition& edge(int from, int to) const;
    std::optional<Transition> find_edge(int from, int to) const;
};

// Builds the transition data from rectangle overlaps; does not validate.
MarkovPartition make_partition(std::string name, const TorusAutomorphism& f, std::vector<Rectangle> rects,
                               long double tol = 1e-9L);
// The partition of f^{-1} with the same rectangles, coordinates swapped.
MarkovPartition inverse_partition(const MarkovPartition& p);

MarkovPartition builtin_partition(const std::string& name);
MarkovPartition partition_from_json(const nlohmann::json& spec);
nlohmann::json partition_to_json(const MarkovPartition& p);

struct PartitionViolation {
    std::string kind;     // "overlap", "cover", "markov-unstable", "markov-stable", "multi-transition", ...
    std::string witness;  // e.g. "P1 -> Q2 offset (1,1)"
};

struct PartitionReport {
    bool pass = false;
    long double total_area = 0.0L;
    long double spectral_radius = 0.0L;
    long double lambda_u = 0.0L;
    std::vector<PartitionViolation> violations;
};

PartitionReport validate_partition(const MarkovPartition& p, long double tol = 1e-9L);

// Lattice translates tau (standard coordinates) with eigen(tau) inside the
// given eigen-coordinate box, enumerated exactly by rows.
std::vector<IntVec> lattice_points_in(const TorusAutomorphism& f, const Box& b);

}  // namespace symdyn
