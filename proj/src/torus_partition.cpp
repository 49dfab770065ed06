#include <algorithm>
#include <cmath>
#include <sstream>

#include "symdyn/thermo.hpp"
#include "symdyn/torus_map.hpp"

namespace symdyn {

int MarkovPartition::index_of(const StateId& id) const {
    for (std::size_t i = 0; i < rects.size(); ++i)
        if (rects[i].id == id) return static_cast<int>(i);
    throw UnknownState(id.label);
}

std::optional<Transition> MarkovPartition::find_edge(int from, int to) const {
    for (const auto& t : transitions)
        if (t.from == from && t.to == to) return t;
    return std::nullopt;
}

const Transition& MarkovPartition::edge(int from, int to) const {
    for (const auto& t : transitions)
        if (t.from == from && t.to == to) return t;
    throw InvalidInput("no transition " + rects[from].id.label + " -> " + rects[to].id.label);
}

namespace {

// Translates tau with int(a) and int(b + tau) overlapping by more than tol in both directions.
std::vector<IntVec> overlap_translates(const TorusAutomorphism& f, const Box& a, const Box& b, long double tol) {
    Box diff{a.u0 - b.u1 + tol, a.u1 - b.u0 - tol, a.s0 - b.s1 + tol, a.s1 - b.s0 - tol};
    return lattice_points_in(f, diff);
}

std::string offset_str(const IntVec& v) {
    return "(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + ")";
}

}  // namespace

MarkovPartition make_partition(std::string name, const TorusAutomorphism& f, std::vector<Rectangle> rects,
                               long double tol) {
    if (rects.empty()) throw InvalidInput("partition needs rectangles");
    for (const auto& r : rects)
        if (!(r.u_extent > 0) || !(r.s_extent > 0))
            throw InvalidInput("rectangle '" + r.id.label + "' has nonpositive extent");
    MarkovPartition p;
    p.name = std::move(name);
    p.map = f;
    p.rects = std::move(rects);
    std::vector<StateId> ids;
    std::vector<std::pair<StateId, StateId>> edges;
    for (const auto& r : p.rects) ids.push_back(r.id);
    for (std::size_t i = 0; i < p.rects.size(); ++i) {
        Box img = apply_box(f, p.rects[i].box());
        for (std::size_t j = 0; j < p.rects.size(); ++j) {
            auto taus = overlap_translates(f, img, p.rects[j].box(), tol);
            for (const auto& t : taus) p.transitions.push_back({(int)i, (int)j, t});
            if (!taus.empty()) edges.emplace_back(p.rects[i].id, p.rects[j].id);
        }
    }
    p.transition = ShiftGraph::finite(ids, edges);
    long double reach = 0;
    for (const auto& r : p.rects) {
        Box b = r.box();
        reach = std::max({reach, std::fabs(b.u0), std::fabs(b.u1), std::fabs(b.s0), std::fabs(b.s1)});
    }
    p.lattice_radius = (int)std::ceil(f.basis_norm() * reach * std::sqrt(2.0L)) + 2;
    return p;
}

MarkovPartition inverse_partition(const MarkovPartition& p) {
    std::vector<Rectangle> swapped;
    for (const auto& r : p.rects) swapped.push_back({r.id, {r.corner.y, r.corner.x}, r.s_extent, r.u_extent});
    return make_partition(p.name + "-inverse", invert(p.map), std::move(swapped));
}

PartitionReport validate_partition(const MarkovPartition& p, long double tol) {
    PartitionReport rep;
    const auto& f = p.map;
    const auto& R = p.rects;
    rep.lambda_u = std::fabs(f.lambda_u);

    for (std::size_t i = 0; i < R.size(); ++i) {
        for (std::size_t j = i; j < R.size(); ++j) {
            for (const auto& t : overlap_translates(f, R[i].box(), R[j].box(), tol)) {
                if (i == j && t[0] == 0 && t[1] == 0) continue;
                rep.violations.push_back({i == j ? "self-overlap" : "overlap",
                                          R[i].id.label + " meets " + R[j].id.label + " offset " + offset_str(t)});
            }
        }
        rep.total_area += R[i].u_extent * R[i].s_extent * std::fabs(f.basis_det());
    }
    if (std::fabs(rep.total_area - 1.0L) > tol) {
        std::ostringstream os;
        os.precision(17);
        os << "total area " << (double)rep.total_area;
        rep.violations.push_back({"cover", os.str()});
    }

    for (std::size_t i = 0; i < R.size(); ++i) {
        Box img = apply_box(f, R[i].box());
        for (std::size_t j = 0; j < R.size(); ++j) {
            auto taus = overlap_translates(f, img, R[j].box(), tol);
            if (taus.size() > 1)
                rep.violations.push_back({"multi-transition", R[i].id.label + " -> " + R[j].id.label + " " +
                                                                  std::to_string(taus.size()) + " times"});
            for (const auto& t : taus) {
                Box target = R[j].box().shifted(f.lattice_eigen(t));
                std::string w = R[i].id.label + " -> " + R[j].id.label + " offset " + offset_str(t);
                if (img.u0 > target.u0 + tol || img.u1 < target.u1 - tol)
                    rep.violations.push_back({"markov-unstable", w});
                if (img.s0 < target.s0 - tol || img.s1 > target.s1 + tol)
                    rep.violations.push_back({"markov-stable", w});
            }
        }
    }

    try {
        auto hf = harmonic_finite(p.transition);
        rep.spectral_radius = std::exp((long double)hf.h);
        if (std::fabs(rep.spectral_radius - rep.lambda_u) > tol) {
            std::ostringstream os;
            os.precision(17);
            os << "spectral radius " << (double)rep.spectral_radius << " vs lambda_u " << (double)rep.lambda_u;
            rep.violations.push_back({"spectral-radius", os.str()});
        }
    } catch (const Error& e) {
        rep.violations.push_back({"transition-graph", e.what()});
    }
    rep.pass = rep.violations.empty();
    return rep;
}

namespace {

// (a + b sqrt5) / 2
struct QSqrt5 {
    int a, b;
    long double value() const { return (a + b * std::sqrt(5.0L)) / 2.0L; }
};

struct ExactRect {
    const char* id;
    QSqrt5 u0, s0, du, ds;
};

}  // namespace

MarkovPartition builtin_partition(const std::string& name) {
    if (name != "cat-adler-weiss") throw InvalidInput("unknown partition '" + name + "'");
    // Eigen-coordinates of [[2,1],[1,1]] scaled by k = sqrt((5 + sqrt5) / 2), so that
    // the lattice vectors are (phi, -1)/k and (1, phi)/k. The two squares of the
    // Pythagorean tiling, cut along the preimages of their unstable sides.
    static const ExactRect data[] = {
        {"P1", {0, 0}, {-1, -1}, {-1, 1}, {1, 1}},
        {"P2", {-1, 1}, {-1, -1}, {3, -1}, {1, 1}},
        {"P3", {2, 0}, {-1, -1}, {-1, 1}, {1, 1}},
        {"Q1", {1, 1}, {-2, 0}, {3, -1}, {2, 0}},
        {"Q2", {4, 0}, {-2, 0}, {-1, 1}, {2, 0}},
    };
    const long double k = std::sqrt((5.0L + std::sqrt(5.0L)) / 2.0L);
    std::vector<Rectangle> rects;
    for (const auto& r : data)
        rects.push_back({StateId(r.id), {r.u0.value() / k, r.s0.value() / k}, r.du.value() / k, r.ds.value() / k});
    auto p = make_partition(name, make_automorphism({{{2, 1}, {1, 1}}}), std::move(rects));
    auto rep = validate_partition(p, 1e-9L);
    if (!rep.pass)
        throw StructuralViolation("builtin partition failed validation: " + rep.violations.front().kind + " " +
                                  rep.violations.front().witness);
    return p;
}

MarkovPartition partition_from_json(const nlohmann::json& spec) {
    if (!spec.contains("matrix") || !spec.contains("rectangles"))
        throw InvalidInput("partition spec needs \"matrix\" and \"rectangles\"");
    IntMat m{};
    const auto& jm = spec.at("matrix");
    if (!jm.is_array() || jm.size() != 2) throw InvalidInput("matrix must be 2x2");
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = jm.at(i).at(j).get<long long>();
    std::vector<Rectangle> rects;
    for (const auto& r : spec.at("rectangles")) {
        Rectangle rect;
        rect.id = StateId(r.at("id").get<std::string>());
        rect.corner = {r.at("corner").at(0).get<long double>(), r.at("corner").at(1).get<long double>()};
        rect.u_extent = r.at("u_extent").get<long double>();
        rect.s_extent = r.at("s_extent").get<long double>();
        rects.push_back(rect);
    }
    return make_partition(spec.value("name", std::string("custom")), make_automorphism(m), std::move(rects));
}

nlohmann::json partition_to_json(const MarkovPartition& p) {
    nlohmann::json j;
    j["name"] = p.name;
    j["matrix"] = {{p.map.matrix[0][0], p.map.matrix[0][1]}, {p.map.matrix[1][0], p.map.matrix[1][1]}};
    j["rectangles"] = nlohmann::json::array();
    for (const auto& r : p.rects)
        j["rectangles"].push_back({{"id", r.id.label},
                                   {"corner", {(double)r.corner.x, (double)r.corner.y}},
                                   {"u_extent", (double)r.u_extent},
                                   {"s_extent", (double)r.s_extent}});
    return j;
}

}  // namespace symdyn
