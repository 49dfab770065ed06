#include "symdyn/suite.hpp"

#include <cmath>

#include "symdyn/fixtures.hpp"
#include "symdyn/torus_checks.hpp"

namespace symdyn {

namespace {

using nlohmann::json;

double d(long double x) { return static_cast<double>(x); }

long double sarig_gap(const HarmonicFunction& a, const HarmonicFunction& ref) {
    long double worst = 0;
    for (const auto& [s, v] : a.values)
        if (ref.defined(s)) worst = std::max(worst, std::fabs(v - ref.at(s)));
    return worst;
}

// Generated graphs without finite closure carry psi on a ball only, so the
// depths used here stay inside it.
void family_checks(Report& r, const std::string& pre, const ConformalFamily& fam, const FixtureInfo& info,
                   int depth, double tol) {
    const bool closed = fam.graph.has_finite_closure();
    auto fr = verify_family(fam, depth, tol);
    r.add(pre + "measure.conformality",
          json{{"max_discrepancy", fr.conformality.max_discrepancy}, {"roots", fr.roots_checked}, {"depth", depth}}, tol,
          fr.conformality.pass && fr.roots_checked > 0);
    r.add(pre + "measure.consistency", fr.consistency.max_discrepancy, tol, fr.consistency.pass);
    r.add(pre + "measure.support", fr.support_ok, true, fr.support_ok);

    const int k = closed ? 8 : 1;
    auto rm = periodic_ray_mass(fam, info.loop, k);
    const long double rel = rm.summed_available ? std::fabs(rm.summed - rm.formula) / rm.formula : 0.0L;
    r.add(pre + "measure.periodic_ray_mass", json{{"formula", d(rm.formula)}, {"summed", d(rm.summed)}, {"k", k}},
          tol, rm.summed_available && rel < tol);

    std::vector<StateId> past;
    for (int rep = 0; rep < (closed ? 4 : 1); ++rep) past.insert(past.end(), info.loop.begin(), info.loop.end());
    past.push_back(info.loop.front());
    const int n = static_cast<int>(past.size()) - 1;
    LeafArc whole;
    whole.whole_leaf = true;
    auto trace = global_leaf_measure(fam, past, whole, n);
    bool monotone = true;
    for (std::size_t m = 1; m < trace.size(); ++m) monotone = monotone && trace[m] >= trace[m - 1] * (1 - 1e-12L);
    // Each full traversal of the loop multiplies the mass by e^{Lh}.
    const int L = static_cast<int>(info.loop.size());
    const long double expected = std::exp(static_cast<long double>(n) * fam.h) * fam.psi_at(past.front());
    const long double err = std::fabs(trace[n] - expected) / expected;
    r.add(pre + "measure.leaf_trace", json{{"last", d(trace[n])}, {"closed_form", d(expected)}, {"loop_length", L}},
          tol, monotone && err < tol);
}

void finite_checks(Report& r, const FixtureInfo& info, const SuiteConfig& cfg, TraceMap* traces) {
    const std::string pre = info.name + "/";
    ShiftGraph g = fixture_graph(info.name);
    auto gr = validate_graph(g, static_cast<int>(g.all_states().size()));
    r.add(pre + "graph.transitive", json{{"max_out_degree", gr.max_out_degree}, {"max_in_degree", gr.max_in_degree}},
          json{{"degree_bound", g.degree_bound()}}, gr.transitive_on_ball);

    auto psi = harmonic_finite(g);
    r.add(pre + "harmonic.residual", psi.residual, 1e-10, psi.residual < 1e-10);

    auto ent = gurevich_entropy(g, info.base, 40);
    r.add(pre + "entropy.consistency", json{{"gurevich", ent.value}, {"eigen", psi.h}}, 1e-6,
          std::fabs(ent.value - psi.h) < 1e-6);

    auto sar = harmonic_sarig(g, info.base, psi.h, cfg.n_max);
    const long double gap = sarig_gap(sar, psi);
    r.add(pre + "harmonic.sarig_vs_eigen", d(gap), 1e-5, gap < 1e-5);

    if (psi.h > 0) {
        const int n = 300;
        auto rv = classify_recurrence(g, info.base, psi.h, n, 50.0);
        if (traces) (*traces)[pre + "loop_sum"] = rv.trace.partial_sums;
        r.add(pre + "recurrence.verdict", verdict_name(rv.verdict), "Recurrent", rv.verdict == Verdict::Recurrent);
    }

    family_checks(r, pre, make_family(g, psi.h, psi), info, cfg.measure_depth, 1e-12);
}

void renewal_checks(Report& r, const FixtureInfo& info, const SuiteConfig& cfg, TraceMap* traces) {
    const std::string pre = info.name + "/";
    ShiftGraph g = fixture_graph(info.name);
    const double log2 = std::log(2.0);
    auto gr = validate_graph(g, 4);
    r.add(pre + "graph.transitive_on_ball", json{{"max_out_degree", gr.max_out_degree}, {"radius", 4}},
          json{{"degree_bound", g.degree_bound()}}, gr.transitive_on_ball);

    auto ent = gurevich_entropy(g, info.base, 40);
    r.add(pre + "entropy", ent.value, json{{"target", log2}, {"tolerance", 1e-3}}, std::fabs(ent.value - log2) < 1e-3);

    auto rv = classify_recurrence(g, info.base, log2, 40, 15.0);
    if (traces) (*traces)[pre + "loop_sum"] = rv.trace.partial_sums;
    r.add(pre + "recurrence.verdict", verdict_name(rv.verdict), "Recurrent", rv.verdict == Verdict::Recurrent);

    auto exact = renewal_exact_harmonic(g);
    auto rep = check_harmonic(g, exact, 3, 1e-12);
    r.add(pre + "harmonic.closed_form_residual", rep.residual, 1e-12, rep.pass);

    auto sar = harmonic_sarig(g, info.base, log2, cfg.n_max);
    const long double gap = sarig_gap(sar, exact);
    r.add(pre + "harmonic.sarig_vs_closed_form", json{{"max_abs_error", d(gap)}, {"states", sar.values.size()}}, 1e-3,
          gap < 1e-3);

    family_checks(r, pre, make_family(g, log2, exact), info, cfg.measure_depth, 1e-12);
}

void ladder_checks(Report& r, const FixtureInfo& info, const SuiteConfig& cfg, TraceMap* traces) {
    const std::string pre = info.name + "/";
    ShiftGraph g = fixture_graph(info.name);
    const double h = 1.5 * std::log(2.0);
    // (0,2) has no predecessors, so the ladder is not transitive; only the
    // degree bound is asserted (validate_graph throws on a violation).
    auto gr = validate_graph(g, 4);
    r.add(pre + "graph.degree_bound",
          json{{"max_out_degree", gr.max_out_degree}, {"max_in_degree", gr.max_in_degree},
               {"transitive_on_ball", gr.transitive_on_ball}},
          json{{"degree_bound", g.degree_bound()}}, true);

    auto rv = classify_recurrence(g, info.base, h, cfg.n_max, 100.0);
    if (traces) (*traces)[pre + "loop_sum"] = rv.trace.partial_sums;
    r.add(pre + "loop_sum.limit", json{{"partial", d(rv.trace.partial_sums.back())}, {"limit_estimate", rv.fit.limit_estimate},
                                       {"model", rv.fit.model}, {"exponent", rv.fit.exponent}},
          json{{"target", 2.0}, {"tolerance", 0.01}}, std::fabs(rv.fit.limit_estimate - 2.0) < 0.01);
    r.add(pre + "recurrence.verdict", verdict_name(rv.verdict), "not Recurrent", rv.verdict != Verdict::Recurrent);

    const int k_max = 40;
    CyrOptions opts;
    opts.radius = 5;
    auto psi1 = harmonic_cyr(g, info.base, ladder_ray(1, k_max + 1), h, k_max, opts);
    auto rep = check_harmonic(g, psi1, 2, 1e-3);
    r.add(pre + "harmonic.cyr_residual", rep.residual, 1e-3, rep.pass);

    // Agreement between rays is not a claimed property; recorded only.
    auto psi2 = harmonic_cyr(g, info.base, ladder_ray(2, k_max + 1), h, k_max, opts);
    r.add(pre + "harmonic.ray_disagreement", d(sarig_gap(psi2, psi1)), nullptr, true);

    const double tol = std::max(1e-12, 10 * psi1.residual);
    family_checks(r, pre, make_family(g, h, psi1), info, 2, tol);
}

}  // namespace

void run_torus_checks(Report& r, const std::string& pre, const MarkovPartition& p, const SuiteConfig& cfg) {
    const MarkovPartition p_inv = inverse_partition(p);

    auto pr = validate_partition(p, cfg.tol);
    r.add(pre + "partition.valid", json{{"area", d(pr.total_area)}, {"violations", pr.violations.size()}}, cfg.tol,
          pr.pass);
    auto pri = validate_partition(p_inv, cfg.tol);
    r.add(pre + "partition.inverse_valid", json{{"violations", pri.violations.size()}}, cfg.tol, pri.pass);

    if (!pr.pass) return;  // everything below assumes a Markov partition

    const long double lam = p.map.lambda_u;
    auto ent = gurevich_entropy(p.transition, p.rects.front().id, 40);
    r.add(pre + "entropy", ent.value, json{{"target", d(std::log(lam))}, {"tolerance", 1e-6}},
          std::fabs(ent.value - std::log(lam)) < 1e-6);
    r.add(pre + "spectral_radius", d(pr.spectral_radius), json{{"lambda_u", d(pr.lambda_u)}, {"tolerance", 1e-9}},
          std::fabs(pr.spectral_radius - pr.lambda_u) < 1e-9);

    const ConformalFamily fam = partition_family(p);
    const ConformalFamily fam_s = partition_family(p_inv);
    r.add(pre + "harmonic.residual", fam.psi.residual, 1e-10, fam.psi.residual < 1e-10);

    auto rt = roundtrip_sweep(p, 1000, 20, cfg.seed);
    r.add(pre + "coding.roundtrip", json{{"samples", rt.samples}, {"worst_distance_ratio", d(rt.worst_distance_ratio)}},
          1.0, rt.pass);
    const double unique = static_cast<double>(rt.uniquely_coded) / static_cast<double>(rt.samples);
    r.add(pre + "coding.unique_fraction", unique, 0.99, unique >= 0.99);

    auto fb = fiber_bound_check(p, cfg.samples, cfg.seed);
    r.add(pre + "fiber.max_size",
          json{{"max_fiber", fb.max_fiber}, {"samples", fb.samples}, {"boundary_points", fb.boundary_points},
               {"uncoded", fb.uncoded}},
          fb.bound, fb.pass);

    auto is = intersection_sweep(p, 3, 12);
    r.add(pre + "intersection.identity",
          json{{"comparisons", is.comparisons}, {"mismatches", is.mismatches}, {"first_mismatch", is.first_mismatch}}, 0,
          is.pass);

    const int coarse = cfg.depth / 2;
    auto hs = holonomy_sweep(fam, p, 100, 20, cfg.depth, coarse, cfg.seed);
    r.add(pre + "holonomy.within_bound",
          json{{"pairs", hs.pairs}, {"cross_pairs", hs.cross_pairs}, {"max_discrepancy", d(hs.max_discrepancy)},
               {"max_bound", d(hs.max_bound)}},
          json{{"min_cross_pairs", 20}}, hs.within_bound == hs.pairs && hs.cross_pairs >= 20);
    r.add(pre + "holonomy.bound_decay",
          json{{"bounds_decaying", hs.bound_decays}, {"discrepancies_decaying", hs.discrepancy_decays},
               {"observed_ratio", d(hs.max_observed_ratio)}},
          json{{"depths", {coarse, cfg.depth}}, {"factor", std::exp(-(cfg.depth - coarse) * fam.h)}},
          hs.bound_decays == hs.pairs && hs.discrepancy_decays == hs.pairs);

    auto lc = leaf_conformality_sweep(fam, p, 10, 5, 20, cfg.seed);
    r.add(pre + "leaf.conformality", json{{"checks", lc.checks}, {"max_relative_error", d(lc.max_relative_error)}},
          1e-5, lc.pass);

    auto ray = periodic_ray_divergence(fam, p, RationalPoint{0, 0, 1}, 1, 8, 16);
    bool within = true;
    for (std::size_t k = 0; k < ray.measured.size(); ++k)
        within = within && std::fabs(ray.measured[k] - ray.formula[k]) <= ray.bounds[k] + ray.bounds[0] * std::exp(k * fam.h);
    const long double growth = ray.measured.back() / ray.measured.front();
    r.add(pre + "ray.divergence", json{{"growth_k8", d(growth)}, {"fitted_exponent", ray.fitted_exponent}},
          json{{"min_growth", 1e3}}, within && growth > 1e3);

    MargulisSolver solver{fam, p, fam_s, p_inv};
    auto lin = pi_p_linearity(solver, RationalPoint{0, 0, 1}, 20, 1.0L);
    r.add(pre + "margulis.linearity", json{{"max_deviation", d(lin.max_deviation)}, {"monotone", lin.monotone}}, 1e-6,
          lin.pass);
}

Report run_suite(const std::string& fixture, const SuiteConfig& cfg, TraceMap* traces) {
    Report r;
    r.suite = fixture;
    r.environment = {{"seed", cfg.seed}, {"n_max", cfg.n_max}, {"depth", cfg.depth},
                     {"measure_depth", cfg.measure_depth}, {"tol", cfg.tol}, {"samples", cfg.samples}};
    std::vector<std::string> names;
    if (fixture == "all") {
        for (const auto& f : fixtures()) names.push_back(f.name);
    } else {
        fixture_info(fixture);
        names.push_back(fixture);
    }
    for (const auto& name : names) {
        const auto& info = fixture_info(name);
        if (info.kind == "finite")
            finite_checks(r, info, cfg, traces);
        else if (name == "renewal")
            renewal_checks(r, info, cfg, traces);
        else if (name == "ladder")
            ladder_checks(r, info, cfg, traces);
        else
            run_torus_checks(r, name + "/", builtin_partition("cat-adler-weiss"), cfg);
    }
    return r;
}

}  // namespace symdyn
