#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "symdyn/counting.hpp"
#include "symdyn/shift_graph.hpp"

namespace symdyn {

enum class EntropyMethod { ratio, limsup };

struct EntropyEstimate {
    double value = 0.0;
    EntropyMethod method = EntropyMethod::ratio;
    int n_max = 0;
    int period = 1;
    std::vector<double> diagnostics;  // trailing ratio (or 1/n log Z_n) values, oldest first
};

// gcd of the loop lengths n <= n_max at `base`; 0 when there are none.
int loop_period(const std::vector<BigInt>& loop_counts);

EntropyEstimate gurevich_entropy(const ShiftGraph& g, const StateId& base, int n_max,
                                 EntropyMethod method = EntropyMethod::ratio);

enum class Verdict { Recurrent, TransientEvidence, Undecided };

const char* verdict_name(Verdict v);
const char* method_name(EntropyMethod m);

struct TailFit {
    std::string model = "none";  // "geometric", "power" or "none"
    double exponent = 0.0;       // power model: terms ~ n^{-exponent}
    double rate = 0.0;           // geometric model: terms ~ e^{-rate n}
    double rms = 0.0;            // residual of the log-linear fit
    bool summable = false;
    double tail_estimate = 0.0;  // estimated sum of the terms beyond n_max
    double limit_estimate = 0.0; // partial sum + tail estimate
};

struct RecurrenceVerdict {
    Verdict verdict = Verdict::Undecided;
    WeightedSumTrace trace;
    double threshold = 0.0;
    int period = 1;
    TailFit fit;
};

RecurrenceVerdict classify_recurrence(const ShiftGraph& g, const StateId& base, double h, int n_max,
                                      double threshold);

using StateFunction = std::map<StateId, long double>;

// (L0 phi)(R) = sum over R -> S of phi(S), for each requested state.
StateFunction ruelle_apply(const ShiftGraph& g, const StateFunction& phi, const std::vector<StateId>& states);
// Same, on every state of phi's domain whose successors all lie in the domain.
StateFunction ruelle_apply(const ShiftGraph& g, const StateFunction& phi);

enum class HarmonicMethod { eigen, sarig, cyr };
const char* method_name(HarmonicMethod m);

struct HarmonicFunction {
    StateFunction values;
    double h = 0.0;
    double residual = 0.0;
    HarmonicMethod method = HarmonicMethod::eigen;
    StateId base;
    nlohmann::json diagnostics = nlohmann::json::object();

    long double at(const StateId& s) const;
    bool defined(const StateId& s) const { return values.count(s) > 0; }
};

struct ResidualReport {
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::size_t states_checked = 0;
    StateId worst;
};

// Max relative residual |e^{-h} sum psi(S) - psi(R)| / psi(R) over states
// whose successors all carry values; `only` restricts the states examined.
double harmonic_residual(const ShiftGraph& g, const StateFunction& psi, double h,
                         const std::vector<StateId>* only = nullptr, std::size_t* checked = nullptr,
                         StateId* worst = nullptr);

ResidualReport check_harmonic(const ShiftGraph& g, const HarmonicFunction& psi, int radius,
                              double tolerance = 1e-10);

HarmonicFunction harmonic_finite(const ShiftGraph& g, int max_iterations = 200000);

enum class SarigEstimator {
    block,        // ratio of the last period-length windows of the two series
    partial_sum,  // ratio of the full partial sums up to n_max
};

struct SarigOptions {
    int radius = 3;
    SarigEstimator estimator = SarigEstimator::block;
};

HarmonicFunction harmonic_sarig(const ShiftGraph& g, const StateId& a0, double h, int n_max,
                                SarigOptions opts = {});

struct CyrOptions {
    int radius = 3;
    int inner_cap = 4000;
    double inner_tolerance = 1e-15;
};

HarmonicFunction harmonic_cyr(const ShiftGraph& g, const StateId& a0, const std::vector<StateId>& ray, double h,
                              int k_max, CyrOptions opts = {});

std::vector<StateId> ladder_ray(int color, int length);

}  // namespace symdyn
