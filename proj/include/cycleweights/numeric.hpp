#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace cw::num {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0.0; }

// log(exp(x) + exp(y)), tolerant of -inf on either side.
inline double log_add(double x, double y) {
    if (is_neg_inf(x)) return y;
    if (is_neg_inf(y)) return x;
    if (x < y) std::swap(x, y);
    return x + std::log1p(std::exp(y - x));
}

// Two-pass log-sum-exp over a term buffer. -inf terms carry zero mass and
// are skipped; an empty or all--inf input yields -inf.
// The linear accumulation runs in long double so the result is limited by
// the accuracy of exp(), not by summation order.
inline double log_sum_exp(std::span<const double> terms) {
    double m = neg_inf;
    for (double t : terms)
        if (t > m) m = t;
    if (is_neg_inf(m)) return neg_inf;
    long double s = 0.0L;
    for (double t : terms)
        if (!is_neg_inf(t)) s += std::exp(t - m);
    return m + static_cast<double>(std::log(s));
}

// Streaming variant for sums whose terms are produced one at a time.
// Rescales the running linear sum whenever a new maximum arrives.
class LogSumAccumulator {
  public:
    void add(double t) {
        if (is_neg_inf(t)) return;
        if (t > max_) {
            if (!is_neg_inf(max_)) sum_ *= std::exp(max_ - t);
            max_ = t;
            sum_ += 1.0L;
        } else {
            sum_ += std::exp(t - max_);
        }
    }
    double value() const {
        if (is_neg_inf(max_)) return neg_inf;
        return max_ + static_cast<double>(std::log(sum_));
    }

  private:
    double max_ = neg_inf;
    long double sum_ = 0.0L;
};

// Compensated linear-domain sum; used where probabilities are added directly.
class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace cw::num
