#pragma once

#include <span>
#include <vector>

#include "cycleweights/exact_dist.hpp"

namespace cw {

// Saddle-point data at size n for entire weight series:
//   r_n solves I_0(r) = n,    I_b(z) = sum_j j^b theta_j z^j,
//   phi(z) = I_{-1}(z) (log of the generating function of (h_n)).
//
// The estimate of log h_n is
//   log d - n log r_n - (1/2) log(2 pi I_1(r_n)) + phi(r_n),
// where d is the gcd of the support. d > 1 makes the support periodic:
// h_n vanishes off multiples of d, and on multiples all d saddle points
// e^{2 pi i k / d} r_n contribute equally, hence the factor d (log d = 0 in
// the aperiodic case).
struct SaddleData {
    long n = 0;
    double r_n = 0.0;
    double log_I0 = 0.0;
    double log_I1 = 0.0;
    double log_I2 = 0.0;
    double phi = 0.0;
    double log_period = 0.0;      // log d
    double log_hn_estimate = 0.0; // -inf when d does not divide n
};

// Bracket [1, 2^k) by doubling (or [2^-k, 1] when I_0(1) > n), then bisect.
// The residual |I_0(r_n) - n| / n ends below rel_tol. Requires a family with
// entire I_0 (superexponential decay or finite support).
SaddleData solve_rn(const WeightSequence& w, long n, double rel_tol = 1e-12);

double saddle_log_hn(const SaddleData& sd);

// log I_beta(e^{log_z}). Exact for finite support; otherwise the sum stops
// once terms fall drop_nats below the running max past the argmax.
double log_Ibeta(const WeightSequence& w, double beta, double log_z, double drop_nats = 50.0);

// --- ratio bound (h_{n-j}/h_n <= C_delta r_n^{j+1/2}) ------------------------

struct RatioBoundRow {
    long n = 0;
    double sup_log_excess = 0.0; // sup_j [ log h_{n-j} - log h_n - (j+1/2) log r_n ]
    long argmax_j = -1;
};
struct RatioBoundReport {
    double delta = 0.0;
    std::vector<RatioBoundRow> rows;
    double log_C_delta = 0.0; // max over rows
};
RatioBoundReport h_ratio_bound_check(const NormTable& t, const WeightSequence& w,
                                     std::span<const long> grid, double delta);

// --- Ewens regime limits ------------------------------------------------------

struct EwensLimits {
    double tail = 0.0;  // lim P(ell_1 > s n) = (1-s)^theta
    double joint = 0.0; // lim P(ell_1 > s n, ell_2 > t n)
};
EwensLimits ewens_limits(double theta, double s, double t);

// --- giant-cycle regime --------------------------------------------------------

// lim_n P(ell_1 = n - m) = h_m / (1 + sum_{j>=1} h_j). The normalizer keeps
// the h_0 = 1 term: the limit masses over m >= 0 must sum to 1, which pins
// the convention (the report also carries the h_0-free variant).
struct GiantLimitReport {
    long m = 0;
    double value = 0.0;            // h_m / normalizer
    double normalizer = 0.0;       // 1 + sum_{j=1..J} h_j
    double normalizer_no_h0 = 0.0; // sum_{j=1..J} h_j
    long truncation_J = 0;
    double tail_bound = 0.0;       // certified bound on sum_{j>J} h_j
    double b_empirical = 0.0;      // observed sup_n n h_n / theta_n
};
GiantLimitReport giant_cycle_limit(const WeightSequence& w, const NormTable& t, long m);

// --- quick regime, alpha_j = j^gamma with gamma > 1 ---------------------------

struct GammaPrediction {
    double gamma = 0.0;
    long n = 0;
    double log_rn = 0.0;        // numeric, from solve_rn
    double log_rn_asym = 0.0;   // gamma (log n / (gamma-1))^{(gamma-1)/gamma}
    double j_max = 0.0;         // (log_rn / gamma)^{1/(gamma-1)}
    double typical_length = 0.0; // (log n / (gamma-1))^{1/gamma}
    double small_cycle_threshold = 0.0; // log n / log r_n - 3/4
};
GammaPrediction gamma_prediction(double gamma, long n);

double small_cycle_threshold(const SaddleData& sd);

// Exact union bound n P(ell_1 > delta n) on the probability of a macroscopic
// cycle. Zero when delta > 1. Quick regime only.
double macroscopic_tail(const NormTable& t, const WeightSequence& w, long n, double delta);

} // namespace cw
