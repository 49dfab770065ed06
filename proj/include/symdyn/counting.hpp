#pragma once

#include <cmath>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "symdyn/shift_graph.hpp"

namespace symdyn {

using BigInt = boost::multiprecision::cpp_int;

// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(long double x) {
        long double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    long double value() const { return sum_ + comp_; }

private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

// counts[n] = number of admissible words with n edges from origin to target.
struct CountTable {
    StateId origin;
    StateId target;
    std::vector<BigInt> counts;
};

struct WeightedSumTrace {
    double h = 0.0;
    int n_max = 0;
    std::vector<long double> terms;         // e^{-nh} Z_n(a,a)
    std::vector<long double> partial_sums;  // running totals of terms
};

// Exact word counts from a single origin to every state within n_max steps.
struct CountsFrom {
    LocalGraph region;
    std::vector<std::vector<BigInt>> by_step;  // by_step[n][state index]
};

// Exact word counts from every state reaching the target within n_max steps.
struct CountsTo {
    LocalGraph region;
    std::vector<std::vector<BigInt>> by_step;  // by_step[n][state index] = Z_n(state, target)
};

CountsFrom counts_from(const ShiftGraph& g, const StateId& origin, int n_max);
CountsTo counts_to(const ShiftGraph& g, const StateId& target, int n_max);

CountTable count_words(const ShiftGraph& g, const StateId& a, const StateId& b, int n_max);
CountTable count_periodic(const ShiftGraph& g, const StateId& a, int n_max);
WeightedSumTrace weighted_loop_sum(const ShiftGraph& g, const StateId& a, double h, int n_max);

// e^{-n h} * z without overflowing on large counts.
long double weighted_term(const BigInt& z, int n, double h);

}  // namespace symdyn
