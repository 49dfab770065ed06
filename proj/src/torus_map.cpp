#include "symdyn/torus_map.hpp"

#include <algorithm>
#include <cmath>

namespace symdyn {

Vec2 TorusAutomorphism::to_eigen(const Vec2& p) const {
    // Solve p = u e_u + s e_s.
    const long double d = basis_det();
    return {(p.x * e_s.y - p.y * e_s.x) / d, (e_u.x * p.y - e_u.y * p.x) / d};
}

Vec2 TorusAutomorphism::from_eigen(const Vec2& q) const { return e_u * q.x + e_s * q.y; }

IntVec TorusAutomorphism::apply(const IntVec& v) const {
    return {matrix[0][0] * v[0] + matrix[0][1] * v[1], matrix[1][0] * v[0] + matrix[1][1] * v[1]};
}

IntMat TorusAutomorphism::inverse_matrix() const {
    const long long d = det();  // +-1
    return {{{matrix[1][1] * d, -matrix[0][1] * d}, {-matrix[1][0] * d, matrix[0][0] * d}}};
}

IntVec TorusAutomorphism::apply_inverse(const IntVec& v) const {
    auto m = inverse_matrix();
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

long double TorusAutomorphism::basis_norm() const {
    return std::sqrt(e_u.x * e_u.x + e_u.y * e_u.y + e_s.x * e_s.x + e_s.y * e_s.y);
}

namespace {

Vec2 eigenvector(const IntMat& m, long double lambda) {
    Vec2 v;
    if (m[0][1] != 0)
        v = {(long double)m[0][1], lambda - m[0][0]};
    else
        v = {lambda - m[1][1], (long double)m[1][0]};
    v = v * (1.0L / v.norm());
    if (v.x < 0 || (v.x == 0 && v.y < 0)) v = v * -1.0L;
    return v;
}

}  // namespace

TorusAutomorphism make_automorphism(const IntMat& m) {
    TorusAutomorphism f;
    f.matrix = m;
    const long long det = f.det(), tr = f.trace();
    if (det != 1 && det != -1) throw InvalidInput("matrix is not unimodular (det " + std::to_string(det) + ")");
    const long double disc = (long double)tr * tr - 4.0L * det;
    if (std::llabs(tr) <= 2 && det == 1) throw InvalidInput("matrix is not hyperbolic (|trace| <= 2)");
    if (disc <= 0) throw InvalidInput("matrix is not hyperbolic");
    const long double root = std::sqrt(disc);
    // Stable root formulas: the large eigenvalue first, the small one from the determinant.
    f.lambda_u = (tr >= 0 ? (tr + root) : (tr - root)) / 2.0L;
    f.lambda_s = (long double)det / f.lambda_u;
    if (!(std::fabs(f.lambda_u) > 1.0L) || !(std::fabs(f.lambda_s) < 1.0L))
        throw InvalidInput("matrix is not hyperbolic");
    f.e_u = eigenvector(m, f.lambda_u);
    f.e_s = eigenvector(m, f.lambda_s);
    if (f.basis_det() < 0) f.e_s = f.e_s * -1.0L;
    return f;
}

TorusAutomorphism invert(const TorusAutomorphism& f) {
    TorusAutomorphism g;
    g.matrix = f.inverse_matrix();
    g.lambda_u = 1.0L / f.lambda_s;
    g.lambda_s = 1.0L / f.lambda_u;
    g.e_u = f.e_s;
    g.e_s = f.e_u;
    return g;
}

Box apply_box(const TorusAutomorphism& f, const Box& b) {
    long double a0 = f.lambda_u * b.u0, a1 = f.lambda_u * b.u1;
    long double c0 = f.lambda_s * b.s0, c1 = f.lambda_s * b.s1;
    return {std::min(a0, a1), std::max(a0, a1), std::min(c0, c1), std::max(c0, c1)};
}

std::vector<IntVec> lattice_points_in(const TorusAutomorphism& f, const Box& b) {
    std::vector<IntVec> out;
    if (b.u1 < b.u0 || b.s1 < b.s0) return out;
    const Vec2 L1 = f.lattice_eigen({1, 0}), L2 = f.lattice_eigen({0, 1});
    long double xmin = INFINITY, xmax = -INFINITY;
    for (auto u : {b.u0, b.u1})
        for (auto s : {b.s0, b.s1}) {
            Vec2 p = f.from_eigen({u, s});
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
        }
    const long long m0 = (long long)std::floor(xmin) - 1, m1 = (long long)std::ceil(xmax) + 1;
    for (long long m = m0; m <= m1; ++m) {
        long double lo = -INFINITY, hi = INFINITY;
        bool feasible = true;
        auto constrain = [&](long double a, long double base, long double lo_b, long double hi_b) {
            // lo_b <= base + n a <= hi_b
            if (a == 0) {
                if (base < lo_b || base > hi_b) feasible = false;
                return;
            }
            long double x = (lo_b - base) / a, y = (hi_b - base) / a;
            lo = std::max(lo, std::min(x, y));
            hi = std::min(hi, std::max(x, y));
        };
        constrain(L2.x, m * L1.x, b.u0, b.u1);
        constrain(L2.y, m * L1.y, b.s0, b.s1);
        if (!feasible || lo > hi) continue;
        for (long long n = (long long)std::ceil(lo); n <= (long long)std::floor(hi); ++n) {
            // Guard against the floor/ceil landing just outside after rounding.
            Vec2 e = L1 * (long double)m + L2 * (long double)n;
            if (b.contains(e, 0.0L)) out.push_back({m, n});
        }
    }
    return out;
}

}  // namespace symdyn
