#pragma once

#include <vector>

#include "cycleweights/normalization.hpp"

namespace cw {

// Law of ell_1, the length of the cycle containing index 1, at fixed n:
//   P(ell_1 = j) = theta_j h_{n-j} / (n h_n),  j = 1..n.
// Normalization is automatic from the h_n recursion.
struct LengthPMF {
    long n = 0;
    std::vector<double> log_p; // index j = 1..n; [0] unused

    double p(long j) const {
        if (j < 1 || j > n) return 0.0;
        double lp = log_p[static_cast<size_t>(j)];
        return num::is_neg_inf(lp) ? 0.0 : std::exp(lp);
    }
};

// Throws ModelUndefinedError when h_n = 0.
LengthPMF ell1_pmf(const NormTable& t, const WeightSequence& w, long n);

// P(ell_1 in [a,b]) with real endpoints, summed over [a,b] ∩ N, i.e.
// j = ceil(a) .. floor(b). Empty ranges give 0.
double tail_prob(const LengthPMF& pmf, double a, double b);

// P(ell_1 > x), strict.
double tail_prob_gt(const LengthPMF& pmf, double x);

// Joint law of (ell_1, ell_2) at fixed n >= 2, split by whether indices 1
// and 2 share a cycle:
//   diff(j,k)  = theta_j theta_k h_{n-j-k} / (n(n-1) h_n),   j + k <= n
//   same(j)    = (j-1) theta_j h_{n-j} / (n(n-1) h_n)
// Marginalizing over one coordinate reproduces the ell_1 law.
struct JointPMF {
    long n = 0;
    std::vector<double> same;   // j = 0..n
    double diff(long j, long k) const {
        if (j < 1 || k < 1 || j + k > n) return 0.0;
        return diff_rows_[static_cast<size_t>(j - 1)][static_cast<size_t>(k - 1)];
    }
    double total_mass() const;

    std::vector<std::vector<double>> diff_rows_; // row j-1 holds k = 1..n-j
};

// Dense materialization; capped at n = 4000 (quadratic memory). Above the
// cap use joint_tail, which streams.
JointPMF joint_pmf(const NormTable& t, const WeightSequence& w, long n);

// P(ell_1 > s n, ell_2 > t n) by direct double summation, no matrix stored.
double joint_tail(const NormTable& t, const WeightSequence& w, long n, double s, double t_frac);

// E r_k = theta_k h_{n-k} / (k h_n) = n P(ell_1 = k) / k.
double expected_rk(const NormTable& t, const WeightSequence& w, long n, long k);

// E N_{a,b} = n P(ell_1 in [a,b]): expected number of indices in cycles of
// length between a and b.
double expected_nab(const LengthPMF& pmf, double a, double b);

} // namespace cw
