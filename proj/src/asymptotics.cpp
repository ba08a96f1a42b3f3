#include "cycleweights/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cw {

namespace {

// Entire I_0 is what the saddle machinery needs; radius-1 families (Ewens,
// perturbed Ewens, negpower) are out.
bool entire_series(const WeightSequence& w) {
    if (w.finite()) return true;
    if (const auto* pa = std::get_if<PowerAlpha>(&w.family())) return pa->gamma > 1;
    return false;
}

long support_period(const WeightSequence& w) {
    if (const FiniteSupport* fs = w.finite()) {
        long g = 0;
        for (const auto& [j, v] : fs->theta) g = std::gcd(g, j);
        return g;
    }
    return 1;
}

} // namespace

double log_Ibeta(const WeightSequence& w, double beta, double log_z, double drop_nats) {
    if (!entire_series(w))
        throw HypothesisError("log_Ibeta: series not entire for " + w.descriptor());
    std::vector<double> terms;
    auto term_at = [&](long j) {
        return beta * std::log(static_cast<double>(j)) + w.log_theta(j) +
               static_cast<double>(j) * log_z;
    };
    if (const FiniteSupport* fs = w.finite()) {
        for (const auto& [j, v] : fs->theta) terms.push_back(term_at(j));
        return num::log_sum_exp(terms);
    }
    double best = num::neg_inf;
    long argmax = 0;
    for (long j = 1; j <= 100000000L; ++j) {
        double t = term_at(j);
        if (t > best) {
            best = t;
            argmax = j;
        } else if (j > argmax && t < best - drop_nats) {
            break;
        }
        terms.push_back(t);
    }
    return num::log_sum_exp(terms);
}

SaddleData solve_rn(const WeightSequence& w, long n, double rel_tol) {
    if (n < 1) throw std::invalid_argument("solve_rn: n must be >= 1");
    if (!entire_series(w))
        throw HypothesisError("solve_rn: needs an entire weight series (superexponential decay "
                              "or finite support), got " + w.descriptor());

    const double log_n = std::log(static_cast<double>(n));
    auto g = [&](double r) { return log_Ibeta(w, 0.0, std::log(r)) - log_n; };

    double lo = 1.0, hi = 1.0;
    double g1 = g(1.0);
    if (g1 > 0) {
        while (g(lo) > 0) {
            hi = lo;
            lo /= 2;
            if (lo < 1e-300) throw std::runtime_error("solve_rn: bracket underflow");
        }
    } else if (g1 < 0) {
        while (g(hi) < 0) {
            lo = hi;
            hi *= 2;
            if (hi > 1e300) throw std::runtime_error("solve_rn: bracket overflow");
        }
    }
    double r = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > 2 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        r = 0.5 * (lo + hi);
        double gr = g(r);
        if (gr == 0.0) break;
        (gr < 0 ? lo : hi) = r;
    }
    r = 0.5 * (lo + hi);

    SaddleData sd;
    sd.n = n;
    sd.r_n = r;
    const double log_r = std::log(r);
    sd.log_I0 = log_Ibeta(w, 0.0, log_r);
    sd.log_I1 = log_Ibeta(w, 1.0, log_r);
    sd.log_I2 = log_Ibeta(w, 2.0, log_r);
    sd.phi = std::exp(log_Ibeta(w, -1.0, log_r));
    sd.log_period = std::log(static_cast<double>(support_period(w)));

    double residual = std::abs(std::expm1(sd.log_I0 - log_n));
    if (residual > rel_tol)
        throw std::runtime_error("solve_rn: residual " + format_double(residual) +
                                 " above tolerance");

    long d = support_period(w);
    if (d > 1 && n % d != 0) {
        sd.log_hn_estimate = num::neg_inf;
    } else {
        sd.log_hn_estimate = sd.log_period - static_cast<double>(n) * log_r -
                             0.5 * (std::log(2 * M_PI) + sd.log_I1) + sd.phi;
    }
    return sd;
}

double saddle_log_hn(const SaddleData& sd) { return sd.log_hn_estimate; }

RatioBoundReport h_ratio_bound_check(const NormTable& t, const WeightSequence& w,
                                     std::span<const long> grid, double delta) {
    if (!(delta > 0 && delta < 1))
        throw std::invalid_argument("h_ratio_bound_check: delta must be in (0,1)");
    if (t.weights_id != w.descriptor())
        throw std::invalid_argument("h_ratio_bound_check: table/weights mismatch");

    RatioBoundReport rep;
    rep.delta = delta;
    rep.log_C_delta = num::neg_inf;
    for (long n : grid) {
        if (n < 1 || n > t.N)
            throw std::invalid_argument("h_ratio_bound_check: n outside table range");
        if (num::is_neg_inf(t.log_h[static_cast<size_t>(n)])) continue; // h_n = 0 subsequence
        SaddleData sd = solve_rn(w, n);
        const double log_r = std::log(sd.r_n);
        RatioBoundRow row;
        row.n = n;
        row.sup_log_excess = num::neg_inf;
        for (long j = 0; static_cast<double>(j) < (1.0 - delta) * static_cast<double>(n); ++j) {
            double lh = t.log_h[static_cast<size_t>(n - j)];
            if (num::is_neg_inf(lh)) continue;
            double excess = lh - t.log_h[static_cast<size_t>(n)] -
                            (static_cast<double>(j) + 0.5) * log_r;
            if (excess > row.sup_log_excess) {
                row.sup_log_excess = excess;
                row.argmax_j = j;
            }
        }
        rep.rows.push_back(row);
        rep.log_C_delta = std::max(rep.log_C_delta, row.sup_log_excess);
    }
    return rep;
}

EwensLimits ewens_limits(double theta, double s, double t) {
    if (!(theta > 0)) throw std::invalid_argument("ewens_limits: theta must be > 0");
    if (s < 0 || s > 1 || t < 0 || t > 1)
        throw std::invalid_argument("ewens_limits: s, t must be in [0,1]");
    EwensLimits lim;
    lim.tail = std::pow(1.0 - s, theta);
    const double m = std::max(s, t);
    const double plus = std::max(1.0 - s - t, 0.0);
    lim.joint = theta / (1.0 + theta) * std::pow(plus, theta + 1.0) +
                (1.0 + theta * m) / (1.0 + theta) * std::pow(1.0 - m, theta);
    return lim;
}

namespace {

// Certified bound on sum_{j>J} theta_j / j for the families the giant-cycle
// machinery admits.
double theta_over_j_tail(const WeightSequence& w, long J) {
    const double x = static_cast<double>(J);
    if (const auto* np = std::get_if<NegPower>(&w.family()))
        return std::pow(x, -np->gamma) / np->gamma;
    if (const auto* pa = std::get_if<PowerAlpha>(&w.family()); pa && pa->gamma < 1) {
        double u = std::pow(x, pa->gamma);
        return std::exp(-u) / (pa->gamma * u);
    }
    throw HypothesisError("giant_cycle_limit: no certified tail for " + w.descriptor());
}

} // namespace

GiantLimitReport giant_cycle_limit(const WeightSequence& w, const NormTable& t, long m) {
    if (m < 0 || m > t.N) throw std::invalid_argument("giant_cycle_limit: bad m");
    if (w.shift() != 0.0)
        throw HypothesisError("giant_cycle_limit: theta_{n+1}/theta_n -> 1 fails under a shift");
    if (check_hypotheses(w, 16).giant_cycle_ok != Cert::yes)
        throw HypothesisError("giant_cycle_limit: giant-cycle hypothesis not certified for " +
                              w.descriptor());
    // ratio_bound_monitor revalidates the table/weights pairing
    std::vector<double> log_a = ratio_bound_monitor(t, w);

    GiantLimitReport rep;
    rep.m = m;
    rep.truncation_J = t.N;
    double log_b = num::neg_inf;
    for (long n = 1; n <= t.N; ++n) log_b = std::max(log_b, log_a[static_cast<size_t>(n)]);
    rep.b_empirical = std::exp(log_b);

    num::KahanSum s;
    for (long j = 1; j <= t.N; ++j) s.add(std::exp(t.log_h[static_cast<size_t>(j)]));
    rep.normalizer_no_h0 = s.value();
    rep.normalizer = 1.0 + s.value();
    rep.tail_bound = rep.b_empirical * theta_over_j_tail(w, t.N);
    if (!(rep.tail_bound / rep.normalizer < 1e-6))
        throw HypothesisError("giant_cycle_limit: tail of sum h_j not certifiable within N=" +
                              std::to_string(t.N));
    rep.value = std::exp(t.log_h[static_cast<size_t>(m)]) / rep.normalizer;
    return rep;
}

GammaPrediction gamma_prediction(double gamma, long n) {
    if (!(gamma > 1)) throw std::invalid_argument("gamma_prediction: gamma must be > 1");
    if (n < 3) throw std::invalid_argument("gamma_prediction: n must be >= 3");
    GammaPrediction gp;
    gp.gamma = gamma;
    gp.n = n;
    const double log_n = std::log(static_cast<double>(n));
    SaddleData sd = solve_rn(WeightSequence(PowerAlpha{gamma}), n);
    gp.log_rn = std::log(sd.r_n);
    gp.log_rn_asym = gamma * std::pow(log_n / (gamma - 1.0), (gamma - 1.0) / gamma);
    gp.j_max = std::pow(gp.log_rn / gamma, 1.0 / (gamma - 1.0));
    gp.typical_length = std::pow(log_n / (gamma - 1.0), 1.0 / gamma);
    gp.small_cycle_threshold = small_cycle_threshold(sd);
    return gp;
}

double small_cycle_threshold(const SaddleData& sd) {
    return std::log(static_cast<double>(sd.n)) / std::log(sd.r_n) - 0.75;
}

double macroscopic_tail(const NormTable& t, const WeightSequence& w, long n, double delta) {
    if (w.regime() != Regime::quickly_diverging)
        throw HypothesisError("macroscopic_tail: quick regime only, got " + w.descriptor());
    if (delta > 1.0) return 0.0;
    LengthPMF pmf = ell1_pmf(t, w, n);
    return static_cast<double>(n) * tail_prob_gt(pmf, delta * static_cast<double>(n));
}

} // namespace cw
