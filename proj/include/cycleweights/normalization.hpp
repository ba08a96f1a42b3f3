#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cycleweights/errors.hpp"
#include "cycleweights/weights.hpp"

namespace cw {

// How the inner sum of the h_n recursion is evaluated.
//
// full     — every term; exact up to floating summation. O(N^2).
// adaptive — once past the running argmax, terms more than drop_threshold
//            nats below the running max are dropped and the scan stops.
//            Only sound for superexponentially decaying weights, where each
//            inner sum is sharply peaked; the neglected mass per sum is
//            below n * e^{-drop_threshold} relative. O(N * effective support).
struct TruncationPolicy {
    enum class Kind { full, adaptive };
    Kind kind = Kind::full;
    double drop_threshold = 50.0;

    static TruncationPolicy Full() { return {}; }
    static TruncationPolicy Adaptive(double nats = 50.0) {
        return {Kind::adaptive, nats};
    }

    std::string text() const;
    bool operator==(const TruncationPolicy& o) const {
        return kind == o.kind && (kind == Kind::full || drop_threshold == o.drop_threshold);
    }
};

std::optional<TruncationPolicy> parse_policy(const std::string& text);

// Normalization constants in log domain: log_h[n] = log h_n for n = 0..N,
// with h_n = (1/n) sum_{j=1..n} theta_j h_{n-j}, h_0 = 1. log_h[n] is -inf
// exactly when every term vanishes (periodic support).
struct NormTable {
    std::string weights_id; // descriptor of the generating weights
    long N = 0;
    std::vector<double> log_h;
    TruncationPolicy policy;
};

NormTable build_norm_table(const WeightSequence& w, long N,
                           TruncationPolicy policy = TruncationPolicy::Full());

// log((theta)_n / n!) via log-Gamma. For constant weights theta_j = theta
// this equals log h_n exactly, not merely asymptotically.
double ewens_log_hn(double theta, long n);

// log C for near-constant weights: sum_{j>=1} (theta_j - theta)/j, truncated
// with a certified tail below 1e-12. Requires the Ewens hypothesis.
double prop22_log_constant(const WeightSequence& w);

// a_n = n h_n / theta_n in log domain, n = 1..N (index 0 unused). Requires a
// certified giant-cycle family, where 1 <= a_n <= B for some finite B; the
// bound itself is non-constructive, so consumers record the empirical max.
std::vector<double> ratio_bound_monitor(const NormTable& t, const WeightSequence& w);

// --- disk cache ------------------------------------------------------------
//
// Line 1:  cycleweights-norm v1 <family-descriptor> N=<N> policy=<...>
// then N+1 lines "<n>\t<log_h_n>", floats with 17 significant digits
// ("-inf" for vanishing h_n), so a reloaded table is bit-identical.

void save_norm_table(const NormTable& t, const std::filesystem::path& file);
std::optional<NormTable> load_norm_table(const std::filesystem::path& file);

std::string norm_cache_filename(const std::string& weights_id, long N, TruncationPolicy policy);

// Load-or-build: returns a cached table when the header matches exactly,
// otherwise recomputes (and refreshes the cache when a directory is given).
NormTable cached_norm_table(const WeightSequence& w, long N, TruncationPolicy policy,
                            const std::optional<std::filesystem::path>& cache_dir);

} // namespace cw
