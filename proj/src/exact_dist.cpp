#include "cycleweights/exact_dist.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cw {

namespace {

void require_consistent(const NormTable& t, const WeightSequence& w, long n, long n_min) {
    if (t.weights_id != w.descriptor())
        throw std::invalid_argument("table built for '" + t.weights_id + "', weights are '" +
                                    w.descriptor() + "'");
    if (n < n_min || n > t.N)
        throw std::invalid_argument("n=" + std::to_string(n) + " outside table range");
    if (num::is_neg_inf(t.log_h[static_cast<size_t>(n)]))
        throw ModelUndefinedError("h_n = 0 at n=" + std::to_string(n) +
                                  "; the measure is undefined there");
}

} // namespace

LengthPMF ell1_pmf(const NormTable& t, const WeightSequence& w, long n) {
    require_consistent(t, w, n, 1);
    LengthPMF pmf;
    pmf.n = n;
    pmf.log_p.assign(static_cast<size_t>(n) + 1, num::neg_inf);
    const double log_hn = t.log_h[static_cast<size_t>(n)];
    const double log_n = std::log(static_cast<double>(n));
    for (long j = 1; j <= n; ++j) {
        double lt = w.log_theta(j);
        if (num::is_neg_inf(lt)) continue;
        double lh = t.log_h[static_cast<size_t>(n - j)];
        if (num::is_neg_inf(lh)) continue;
        pmf.log_p[static_cast<size_t>(j)] = lt + lh - log_hn - log_n;
    }
    return pmf;
}

double tail_prob(const LengthPMF& pmf, double a, double b) {
    long lo = static_cast<long>(std::ceil(a));
    long hi = static_cast<long>(std::floor(b));
    lo = std::max(lo, 1L);
    hi = std::min(hi, pmf.n);
    num::KahanSum s;
    for (long j = lo; j <= hi; ++j) s.add(pmf.p(j));
    return s.value();
}

double tail_prob_gt(const LengthPMF& pmf, double x) {
    return tail_prob(pmf, std::floor(x) + 1.0, static_cast<double>(pmf.n));
}

double JointPMF::total_mass() const {
    num::KahanSum s;
    for (double v : same) s.add(v);
    for (const auto& row : diff_rows_)
        for (double v : row) s.add(v);
    return s.value();
}

JointPMF joint_pmf(const NormTable& t, const WeightSequence& w, long n) {
    require_consistent(t, w, n, 2);
    if (n > 4000) throw std::invalid_argument("joint_pmf: dense law capped at n=4000; use joint_tail");

    JointPMF jp;
    jp.n = n;
    jp.same.assign(static_cast<size_t>(n) + 1, 0.0);
    jp.diff_rows_.resize(static_cast<size_t>(n - 1));

    const std::vector<double> lt = log_theta_row(w, n);
    const double log_hn = t.log_h[static_cast<size_t>(n)];
    const double log_pairs =
        std::log(static_cast<double>(n)) + std::log(static_cast<double>(n - 1));

    for (long j = 2; j <= n; ++j) {
        double x = lt[static_cast<size_t>(j)] + t.log_h[static_cast<size_t>(n - j)];
        if (num::is_neg_inf(x)) continue;
        jp.same[static_cast<size_t>(j)] =
            static_cast<double>(j - 1) * std::exp(x - log_hn - log_pairs);
    }
    for (long j = 1; j <= n - 1; ++j) {
        auto& row = jp.diff_rows_[static_cast<size_t>(j - 1)];
        row.assign(static_cast<size_t>(n - j), 0.0);
        if (num::is_neg_inf(lt[static_cast<size_t>(j)])) continue;
        for (long k = 1; k <= n - j; ++k) {
            double x = lt[static_cast<size_t>(j)] + lt[static_cast<size_t>(k)] +
                       t.log_h[static_cast<size_t>(n - j - k)];
            if (num::is_neg_inf(x)) continue;
            row[static_cast<size_t>(k - 1)] = std::exp(x - log_hn - log_pairs);
        }
    }
    return jp;
}

double joint_tail(const NormTable& t, const WeightSequence& w, long n, double s, double t_frac) {
    require_consistent(t, w, n, 2);
    const std::vector<double> lt = log_theta_row(w, n);
    const double log_hn = t.log_h[static_cast<size_t>(n)];
    const double log_pairs =
        std::log(static_cast<double>(n)) + std::log(static_cast<double>(n - 1));

    const long j_min = static_cast<long>(std::floor(s * static_cast<double>(n))) + 1;
    const long k_min = static_cast<long>(std::floor(t_frac * static_cast<double>(n))) + 1;

    num::KahanSum total;
    for (long j = std::max(j_min, 1L); j <= n; ++j) {
        if (num::is_neg_inf(lt[static_cast<size_t>(j)])) continue;
        for (long k = std::max(k_min, 1L); k <= n - j; ++k) {
            double x = lt[static_cast<size_t>(j)] + lt[static_cast<size_t>(k)] +
                       t.log_h[static_cast<size_t>(n - j - k)];
            if (num::is_neg_inf(x)) continue;
            total.add(std::exp(x - log_hn - log_pairs));
        }
    }
    // same cycle: ell_1 = ell_2 = j must clear both thresholds
    for (long j = std::max({j_min, k_min, 2L}); j <= n; ++j) {
        double x = lt[static_cast<size_t>(j)] + t.log_h[static_cast<size_t>(n - j)];
        if (num::is_neg_inf(x)) continue;
        total.add(static_cast<double>(j - 1) * std::exp(x - log_hn - log_pairs));
    }
    return total.value();
}

double expected_rk(const NormTable& t, const WeightSequence& w, long n, long k) {
    require_consistent(t, w, n, 1);
    if (k < 1 || k > n) throw std::invalid_argument("expected_rk: need 1 <= k <= n");
    double x = w.log_theta(k) + t.log_h[static_cast<size_t>(n - k)];
    if (num::is_neg_inf(x)) return 0.0;
    return std::exp(x - t.log_h[static_cast<size_t>(n)] -
                    std::log(static_cast<double>(k)));
}

double expected_nab(const LengthPMF& pmf, double a, double b) {
    return static_cast<double>(pmf.n) * tail_prob(pmf, a, b);
}

} // namespace cw
