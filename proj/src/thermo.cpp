#include "symdyn/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

namespace symdyn {

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Recurrent: return "Recurrent";
        case Verdict::TransientEvidence: return "TransientEvidence";
        case Verdict::Undecided: return "Undecided";
    }
    return "?";
}

const char* method_name(EntropyMethod m) { return m == EntropyMethod::ratio ? "ratio" : "limsup"; }

const char* method_name(HarmonicMethod m) {
    switch (m) {
        case HarmonicMethod::eigen: return "eigen";
        case HarmonicMethod::sarig: return "sarig";
        case HarmonicMethod::cyr: return "cyr";
    }
    return "?";
}

long double HarmonicFunction::at(const StateId& s) const {
    auto it = values.find(s);
    if (it == values.end()) throw RangeError("harmonic function not evaluated at '" + s.label + "'");
    return it->second;
}

int loop_period(const std::vector<BigInt>& counts) {
    int p = 0;
    for (std::size_t n = 1; n < counts.size(); ++n)
        if (!counts[n].is_zero()) p = std::gcd(p, static_cast<int>(n));
    return p;
}

namespace {

long double log_big(const BigInt& z) { return std::log(z.convert_to<long double>()); }

}  // namespace

EntropyEstimate gurevich_entropy(const ShiftGraph& g, const StateId& base, int n_max, EntropyMethod method) {
    if (n_max < 4) throw InvalidInput("entropy needs n_max >= 4");
    auto table = count_periodic(g, base, n_max);
    int p = loop_period(table.counts);
    if (p == 0) throw NumericalFailure("no loops at '" + base.label + "' up to n_max=" + std::to_string(n_max));

    EntropyEstimate est;
    est.method = method;
    est.n_max = n_max;
    est.period = p;
    const auto& Z = table.counts;
    if (method == EntropyMethod::ratio) {
        // Walk down to the last n with a nonzero count whose predecessor window is nonzero too.
        std::vector<double> ratios;
        for (int n = n_max; n - p >= 1 && ratios.size() < 6; --n) {
            if (Z[n].is_zero() || Z[n - p].is_zero()) continue;
            ratios.push_back(static_cast<double>((log_big(Z[n]) - log_big(Z[n - p])) / p));
        }
        if (ratios.empty()) throw NumericalFailure("too few loops at '" + base.label + "' for the ratio method");
        est.value = ratios.front();
        std::reverse(ratios.begin(), ratios.end());
        est.diagnostics = ratios;
    } else {
        double best = -1.0;
        for (int n = n_max / 2; n <= n_max; ++n) {
            if (n == 0 || Z[n].is_zero()) continue;
            double v = static_cast<double>(log_big(Z[n]) / n);
            best = std::max(best, v);
            est.diagnostics.push_back(v);
        }
        if (est.diagnostics.size() > 6)
            est.diagnostics.erase(est.diagnostics.begin(), est.diagnostics.end() - 6);
        est.value = std::max(0.0, best);
    }
    return est;
}

namespace {

struct LinearFit {
    Eigen::VectorXd coef;
    double rms = 0.0;
};

LinearFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    LinearFit f;
    f.coef = X.colPivHouseholderQr().solve(y);
    f.rms = std::sqrt((X * f.coef - y).squaredNorm() / static_cast<double>(y.size()));
    return f;
}

// Sum over n = start, start+p, ... of exp(c - alpha log n + d/n), with an
// integral estimate for the far tail.
double power_tail(double c, double alpha, double d, int start, int p) {
    const long steps = 200000;
    CompensatedSum acc;
    long n = start;
    for (long i = 0; i < steps; ++i, n += p)
        acc.add(std::exp(static_cast<long double>(c) - alpha * std::log(static_cast<long double>(n)) + d / n));
    const double N = static_cast<double>(n) - 0.5 * p;
    const double C = std::exp(c);
    double rest = C / p * (std::pow(N, 1.0 - alpha) / (alpha - 1.0) + d * std::pow(N, -alpha) / alpha);
    return static_cast<double>(acc.value()) + rest;
}

TailFit fit_tail(const WeightedSumTrace& tr, int p) {
    TailFit fit;
    std::vector<int> ns;
    for (int n = std::max(1, tr.n_max / 2); n <= tr.n_max; ++n)
        if (tr.terms[n] > 0) ns.push_back(n);
    if (ns.size() < 4) return fit;

    const auto m = static_cast<Eigen::Index>(ns.size());
    Eigen::VectorXd y(m);
    Eigen::MatrixXd G(m, 2), P(m, 3);
    for (Eigen::Index i = 0; i < m; ++i) {
        double n = ns[i];
        y(i) = std::log(static_cast<double>(tr.terms[ns[i]]));
        G(i, 0) = 1.0;
        G(i, 1) = -n;
        P(i, 0) = 1.0;
        P(i, 1) = -std::log(n);
        P(i, 2) = 1.0 / n;
    }
    auto geo = least_squares(G, y);
    auto pow = least_squares(P, y);
    const double partial = static_cast<double>(tr.partial_sums.back());
    const int last = ns.back();
    if (geo.rms <= pow.rms) {
        fit.model = "geometric";
        fit.rate = geo.coef(1);
        fit.rms = geo.rms;
        fit.summable = fit.rate > 1e-6;
        if (fit.summable) {
            double q = std::exp(-fit.rate * p);
            fit.tail_estimate = std::exp(geo.coef(0) - fit.rate * (last + p)) / (1.0 - q);
        }
    } else {
        fit.model = "power";
        fit.exponent = pow.coef(1);
        fit.rms = pow.rms;
        fit.summable = fit.exponent > 1.0 + 1e-6;
        if (fit.summable) fit.tail_estimate = power_tail(pow.coef(0), fit.exponent, pow.coef(2), last + p, p);
    }
    fit.limit_estimate = partial + fit.tail_estimate;
    return fit;
}

}  // namespace

RecurrenceVerdict classify_recurrence(const ShiftGraph& g, const StateId& base, double h, int n_max,
                                      double threshold) {
    RecurrenceVerdict rv;
    rv.trace = weighted_loop_sum(g, base, h, n_max);
    rv.threshold = threshold;
    auto table = count_periodic(g, base, n_max);
    rv.period = std::max(1, loop_period(table.counts));
    rv.fit = fit_tail(rv.trace, rv.period);
    const double total = static_cast<double>(rv.trace.partial_sums.back());
    if (total > threshold) {
        rv.verdict = Verdict::Recurrent;
    } else if (rv.fit.summable && rv.fit.rms < 0.05) {
        rv.verdict = Verdict::TransientEvidence;
    } else {
        rv.verdict = Verdict::Undecided;
    }
    return rv;
}

StateFunction ruelle_apply(const ShiftGraph& g, const StateFunction& phi, const std::vector<StateId>& states) {
    StateFunction out;
    for (const auto& r : states) {
        CompensatedSum acc;
        for (const auto& s : g.successors(r)) {
            auto it = phi.find(s);
            if (it == phi.end())
                throw RangeError("function undefined at successor '" + s.label + "' of '" + r.label + "'");
            acc.add(it->second);
        }
        out[r] = acc.value();
    }
    return out;
}

StateFunction ruelle_apply(const ShiftGraph& g, const StateFunction& phi) {
    std::vector<StateId> interior;
    for (const auto& [r, v] : phi) {
        const auto& succ = g.successors(r);
        if (std::all_of(succ.begin(), succ.end(), [&](const StateId& s) { return phi.count(s) > 0; }))
            interior.push_back(r);
    }
    return ruelle_apply(g, phi, interior);
}

double harmonic_residual(const ShiftGraph& g, const StateFunction& psi, double h, const std::vector<StateId>* only,
                         std::size_t* checked, StateId* worst) {
    const long double scale = std::exp(-static_cast<long double>(h));
    long double res = 0.0L;
    std::size_t count = 0;
    auto visit = [&](const StateId& r, long double v) {
        const auto& succ = g.successors(r);
        CompensatedSum acc;
        for (const auto& s : succ) {
            auto it = psi.find(s);
            if (it == psi.end()) return;
            acc.add(it->second);
        }
        ++count;
        long double e = std::fabs(scale * acc.value() - v) / v;
        if (count == 1 || e > res) {
            res = e;
            if (worst) *worst = r;
        }
    };
    if (only) {
        for (const auto& r : *only) {
            auto it = psi.find(r);
            if (it != psi.end()) visit(r, it->second);
        }
    } else {
        for (const auto& [r, v] : psi) visit(r, v);
    }
    if (checked) *checked = count;
    return static_cast<double>(res);
}

ResidualReport check_harmonic(const ShiftGraph& g, const HarmonicFunction& psi, int radius, double tolerance) {
    auto region = ball(g, psi.base, radius);
    std::vector<StateId> states(region.begin(), region.end());
    ResidualReport rep;
    rep.tolerance = tolerance;
    rep.residual = harmonic_residual(g, psi.values, psi.h, &states, &rep.states_checked, &rep.worst);
    rep.pass = rep.states_checked > 0 && rep.residual < tolerance;
    return rep;
}

HarmonicFunction harmonic_finite(const ShiftGraph& g, int max_iterations) {
    if (!g.has_finite_closure()) throw InvalidInput("harmonic_finite needs a finite graph");
    auto lg = materialize(g, g.all_states());
    const std::size_t n = lg.size();
    const int b = lg.find(g.base());

    // Power iteration on A + I; the shift keeps periodic graphs convergent.
    std::vector<long double> x(n, 1.0L), y(n);
    double spread = 1.0;
    int it = 0;
    for (; it < max_iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            CompensatedSum acc;
            acc.add(x[i]);
            for (int j : lg.succ[i]) acc.add(x[j]);
            y[i] = acc.value();
        }
        long double lo = INFINITY, hi = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i] <= 0) continue;
            long double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        const long double norm = y[b];
        if (!(norm > 0)) throw NumericalFailure("power iteration collapsed at the base state");
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / norm;
        spread = static_cast<double>((hi - lo) / hi);
        if (spread < 1e-17) break;
    }

    HarmonicFunction hf;
    hf.method = HarmonicMethod::eigen;
    hf.base = g.base();
    CompensatedSum num, den;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0))
            throw NumericalFailure("Perron vector not positive at '" + lg.states[i].label + "' (graph not transitive?)");
        for (int j : lg.succ[i]) num.add(x[j]);
        den.add(x[i]);
        hf.values[lg.states[i]] = x[i];
    }
    const long double growth = num.value() / den.value();
    hf.h = static_cast<double>(std::log(growth));
    hf.residual = harmonic_residual(g, hf.values, hf.h);
    hf.diagnostics = {{"iterations", it}, {"ratio_spread", spread}, {"spectral_radius", static_cast<double>(growth)}};
    if (!(hf.residual < 1e-10))
        throw NumericalFailure("power iteration did not converge; residual " + std::to_string(hf.residual));
    return hf;
}

HarmonicFunction harmonic_sarig(const ShiftGraph& g, const StateId& a0, double h, int n_max, SarigOptions opts) {
    g.require(a0);
    if (n_max < 1) throw InvalidInput("n_max must be positive");
    auto to = counts_to(g, a0, n_max);
    const auto& lg = to.region;
    const int ia = lg.find(a0);

    std::vector<BigInt> loops(n_max + 1);
    for (int i = 0; i <= n_max; ++i) loops[i] = to.by_step[i][ia];
    const int p = loop_period(loops);
    if (p == 0) throw NumericalFailure("denominator zero: no loops at '" + a0.label + "' within n_max");

    // Series for every state in the region: full partial sum, last window,
    // and the window one period earlier for the convergence report.
    const int win_lo = std::max(0, n_max - p + 1);
    const int prev_lo = std::max(0, win_lo - p);
    std::vector<CompensatedSum> full(lg.size()), win(lg.size()), prev(lg.size());
    for (int i = 0; i <= n_max; ++i) {
        for (std::size_t r = 0; r < lg.size(); ++r) {
            long double t = weighted_term(to.by_step[i][r], i, h);
            if (t == 0) continue;
            full[r].add(t);
            if (i >= win_lo) win[r].add(t);
            if (i >= prev_lo && i < win_lo) prev[r].add(t);
        }
    }
    const bool block = opts.estimator == SarigEstimator::block;
    const long double den = block ? win[ia].value() : full[ia].value();
    if (!(den > 0)) throw NumericalFailure("denominator zero at '" + a0.label + "'");
    const long double den_prev = prev[ia].value();

    HarmonicFunction hf;
    hf.method = HarmonicMethod::sarig;
    hf.base = a0;
    hf.h = h;
    double literal_gap = 0.0, step_change = 0.0;
    nlohmann::json unresolved = nlohmann::json::array();
    for (const auto& s : ball(g, a0, opts.radius)) {
        int r = lg.find(s);
        long double v = r < 0 ? 0.0L : (block ? win[r].value() : full[r].value()) / den;
        if (!(v > 0)) {
            unresolved.push_back(s.label);
            continue;
        }
        hf.values[s] = v;
        long double lit = full[r].value() / full[ia].value();
        literal_gap = std::max(literal_gap, static_cast<double>(std::fabs(lit - v) / v));
        if (block && den_prev > 0 && prev[r].value() > 0) {
            long double before = prev[r].value() / den_prev;
            step_change = std::max(step_change, static_cast<double>(std::fabs(before - v) / v));
        }
    }
    hf.residual = harmonic_residual(g, hf.values, h);
    hf.diagnostics = {{"estimator", block ? "block" : "partial_sum"},
                      {"period", p},
                      {"n_max", n_max},
                      {"radius", opts.radius},
                      {"partial_sum_ratio_gap", literal_gap},
                      {"last_step_change", step_change},
                      {"unresolved_states", unresolved}};
    return hf;
}

std::vector<StateId> ladder_ray(int color, int length) {
    std::vector<StateId> ray{StateId(ladder_label(0, 1))};
    for (int n = 1; n < length; ++n) ray.emplace_back(ladder_label(n, color));
    return ray;
}

namespace {

// Green-type sums G(R, target) = sum_i e^{-ih} Z_i(R, target), floating DP.
struct GreenSums {
    std::vector<long double> values;  // aligned with `tracked`
    int terms_used = 0;
    bool cap_hit = false;
};

GreenSums green_sums(const ShiftGraph& g, const StateId& target, const std::vector<StateId>& tracked, double h,
                     const CyrOptions& opts) {
    auto lg = explore(g, {target}, opts.inner_cap, Direction::backward);
    std::vector<int> idx;
    for (const auto& s : tracked) idx.push_back(lg.find(s));
    const long double w = std::exp(-static_cast<long double>(h));

    // BFS order means indices are sorted by distance to the target; at step i
    // only the prefix with distance <= i can be nonzero.
    std::vector<long double> cur(lg.size(), 0.0L), nxt(lg.size(), 0.0L);
    cur[lg.find(target)] = 1.0L;
    std::vector<CompensatedSum> acc(tracked.size());
    std::vector<long double> last_terms(tracked.size(), 0.0L);
    GreenSums out;
    std::size_t active = 1;
    for (int i = 0;; ++i) {
        bool settled = i > 1;
        for (std::size_t k = 0; k < tracked.size(); ++k) {
            if (idx[k] < 0) continue;
            long double t = cur[idx[k]];
            acc[k].add(t);
            long double s = acc[k].value();
            long double recent = t + last_terms[k];
            if (!(s > 0) || recent > opts.inner_tolerance * s) settled = false;
            last_terms[k] = t;
        }
        out.terms_used = i + 1;
        if (settled) break;
        if (i == opts.inner_cap) {
            out.cap_hit = true;
            break;
        }
        while (active < lg.size() && lg.distance[active] <= i + 1) ++active;
        for (std::size_t r = 0; r < active; ++r) {
            CompensatedSum s;
            for (int j : lg.succ[r]) s.add(cur[j]);
            nxt[r] = w * s.value();
        }
        std::swap(cur, nxt);
    }
    for (std::size_t k = 0; k < tracked.size(); ++k) out.values.push_back(idx[k] < 0 ? 0.0L : acc[k].value());
    return out;
}

}  // namespace

HarmonicFunction harmonic_cyr(const ShiftGraph& g, const StateId& a0, const std::vector<StateId>& ray, double h,
                              int k_max, CyrOptions opts) {
    g.require(a0);
    if (k_max < 1) throw InvalidInput("ray index must be positive");
    if (static_cast<int>(ray.size()) <= k_max)
        throw InvalidInput("ray has " + std::to_string(ray.size()) + " states, need more than k=" +
                           std::to_string(k_max));
    std::set<StateId> seen;
    for (std::size_t i = 0; i < ray.size(); ++i) {
        g.require(ray[i]);
        if (!seen.insert(ray[i]).second) throw InvalidInput("ray is not injective: '" + ray[i].label + "' repeats");
        if (i + 1 < ray.size() && !g.has_edge(ray[i], ray[i + 1]))
            throw InvalidInput("ray is not admissible at " + ray[i].label + "->" + ray[i + 1].label);
    }

    auto region = ball(g, a0, opts.radius);
    std::vector<StateId> tracked(region.begin(), region.end());
    if (!region.count(a0)) tracked.push_back(a0);
    const auto ia = static_cast<std::size_t>(std::find(tracked.begin(), tracked.end(), a0) - tracked.begin());

    std::vector<int> schedule;
    for (int k = 1; k < k_max; k *= 2) schedule.push_back(k);
    if (k_max > 1 && schedule.back() != k_max - 1) schedule.push_back(k_max - 1);
    schedule.push_back(k_max);

    std::vector<long double> prev_vals, vals;
    nlohmann::json conv = nlohmann::json::array();
    int max_terms = 0;
    bool any_cap = false;
    for (int k : schedule) {
        auto gs = green_sums(g, ray[k], tracked, h, opts);
        max_terms = std::max(max_terms, gs.terms_used);
        any_cap = any_cap || gs.cap_hit;
        const long double den = gs.values[ia];
        if (!(den > 0))
            throw NumericalFailure("denominator zero: ray state '" + ray[k].label + "' unreachable from '" +
                                   a0.label + "'");
        vals.assign(tracked.size(), 0.0L);
        for (std::size_t i = 0; i < tracked.size(); ++i) vals[i] = gs.values[i] / den;
        double diff = 0.0;
        if (!prev_vals.empty())
            for (std::size_t i = 0; i < tracked.size(); ++i)
                if (vals[i] > 0 && prev_vals[i] > 0)
                    diff = std::max(diff, static_cast<double>(std::fabs(vals[i] - prev_vals[i]) / vals[i]));
        conv.push_back({{"k", k}, {"max_rel_change", diff}, {"inner_terms", gs.terms_used}});
        prev_vals = vals;
    }

    HarmonicFunction hf;
    hf.method = HarmonicMethod::cyr;
    hf.base = a0;
    hf.h = h;
    nlohmann::json unresolved = nlohmann::json::array();
    for (std::size_t i = 0; i < tracked.size(); ++i) {
        if (vals[i] > 0)
            hf.values[tracked[i]] = vals[i];
        else
            unresolved.push_back(tracked[i].label);
    }
    hf.residual = harmonic_residual(g, hf.values, h);
    hf.diagnostics = {{"k_max", k_max},
                      {"radius", opts.radius},
                      {"inner_cap", opts.inner_cap},
                      {"inner_cap_hit", any_cap},
                      {"inner_terms_max", max_terms},
                      {"convergence", conv},
                      {"unresolved_states", unresolved}};
    return hf;
}

}  // namespace symdyn
