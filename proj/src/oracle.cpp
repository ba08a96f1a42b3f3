#include "cycleweights/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cw {

std::string cycle_type_key(const CycleType& ct) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [j, rj] : ct.r) {
        if (!first) os << " ";
        first = false;
        os << j << ":" << rj;
    }
    return os.str();
}

CycleType cycle_type_of_permutation(std::span<const long> perm) {
    const long n = static_cast<long>(perm.size());
    CycleType ct;
    ct.n = n;
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (long i = 1; i <= n; ++i) {
        if (seen[static_cast<size_t>(i - 1)]) continue;
        long len = 0;
        long cur = i;
        while (!seen[static_cast<size_t>(cur - 1)]) {
            seen[static_cast<size_t>(cur - 1)] = true;
            cur = perm[static_cast<size_t>(cur - 1)];
            ++len;
        }
        ct.r[len] += 1;
    }
    return ct;
}

} // namespace cw

namespace cw::oracle {

namespace {

void check_cap(long n, long cap, const char* what) {
    if (n < 1 || n > cap)
        throw std::invalid_argument(std::string(what) + ": n must be in [1, " +
                                    std::to_string(cap) + "], got " + std::to_string(n));
}

std::map<long, long> occupation(std::span<const long> parts) {
    std::map<long, long> r;
    for (long p : parts) r[p] += 1;
    return r;
}

double partition_log_weight(const WeightSequence& w, const std::map<long, long>& r) {
    double lw = 0.0;
    for (const auto& [j, rj] : r) {
        double lt = w.log_theta(j);
        if (num::is_neg_inf(lt)) return num::neg_inf;
        lw += static_cast<double>(rj) * (lt - std::log(static_cast<double>(j))) -
              std::lgamma(static_cast<double>(rj) + 1.0);
    }
    return lw;
}

// Local log-sum: plain max-then-sum, kept separate from the main pipeline's
// accumulator on purpose.
double local_log_sum(const std::vector<double>& xs) {
    double m = num::neg_inf;
    for (double x : xs)
        if (x > m) m = x;
    if (num::is_neg_inf(m)) return num::neg_inf;
    double s = 0.0;
    for (double x : xs)
        if (!num::is_neg_inf(x)) s += std::exp(x - m);
    return m + std::log(s);
}

// Collects (occupation, linear probability) for all partitions of n.
std::vector<std::pair<std::map<long, long>, double>> partition_law(const WeightSequence& w,
                                                                   long n, double* log_hn_out) {
    std::vector<std::pair<std::map<long, long>, double>> entries;
    std::vector<double> lws;
    enumerate_partitions(n, [&](std::span<const long> parts) {
        auto r = occupation(parts);
        double lw = partition_log_weight(w, r);
        entries.emplace_back(std::move(r), lw);
        lws.push_back(lw);
    });
    double lhn = local_log_sum(lws);
    if (log_hn_out) *log_hn_out = lhn;
    for (auto& [r, lw] : entries)
        lw = num::is_neg_inf(lw) ? 0.0 : std::exp(lw - lhn);
    return entries;
}

} // namespace

void enumerate_partitions(long n, const std::function<void(std::span<const long>)>& emit) {
    check_cap(n, max_n, "enumerate_partitions");
    std::vector<long> a{n};
    for (;;) {
        emit(std::span<const long>(a));
        long k = -1;
        for (long i = static_cast<long>(a.size()) - 1; i >= 0; --i) {
            if (a[static_cast<size_t>(i)] > 1) {
                k = i;
                break;
            }
        }
        if (k < 0) return;
        long rem = a[static_cast<size_t>(k)] + (static_cast<long>(a.size()) - k - 1);
        long v = a[static_cast<size_t>(k)] - 1;
        a.resize(static_cast<size_t>(k));
        while (rem > v) {
            a.push_back(v);
            rem -= v;
        }
        a.push_back(rem);
    }
}

long partition_count(long n) {
    long count = 0;
    enumerate_partitions(n, [&](std::span<const long>) { ++count; });
    return count;
}

double log_hn(const WeightSequence& w, long n) {
    check_cap(n, max_n, "oracle::log_hn");
    std::vector<double> lws;
    enumerate_partitions(n, [&](std::span<const long> parts) {
        lws.push_back(partition_log_weight(w, occupation(parts)));
    });
    return local_log_sum(lws);
}

LengthPMF ell1_pmf(const WeightSequence& w, long n) {
    check_cap(n, max_n, "oracle::ell1_pmf");
    double lhn = 0.0;
    auto law = partition_law(w, n, &lhn);
    if (num::is_neg_inf(lhn))
        throw ModelUndefinedError("oracle: h_n = 0 at n=" + std::to_string(n));
    std::vector<double> p(static_cast<size_t>(n) + 1, 0.0);
    for (const auto& [r, prob] : law)
        for (const auto& [j, rj] : r)
            p[static_cast<size_t>(j)] +=
                prob * static_cast<double>(j * rj) / static_cast<double>(n);
    LengthPMF pmf;
    pmf.n = n;
    pmf.log_p.assign(static_cast<size_t>(n) + 1, num::neg_inf);
    for (long j = 1; j <= n; ++j)
        if (p[static_cast<size_t>(j)] > 0)
            pmf.log_p[static_cast<size_t>(j)] = std::log(p[static_cast<size_t>(j)]);
    return pmf;
}

JointPMF joint(const WeightSequence& w, long n) {
    check_cap(n, max_joint_n, "oracle::joint");
    if (n < 2) throw std::invalid_argument("oracle::joint: n must be >= 2");
    double lhn = 0.0;
    auto law = partition_law(w, n, &lhn);
    if (num::is_neg_inf(lhn))
        throw ModelUndefinedError("oracle: h_n = 0 at n=" + std::to_string(n));

    JointPMF jp;
    jp.n = n;
    jp.same.assign(static_cast<size_t>(n) + 1, 0.0);
    jp.diff_rows_.resize(static_cast<size_t>(n - 1));
    for (long j = 1; j <= n - 1; ++j)
        jp.diff_rows_[static_cast<size_t>(j - 1)].assign(static_cast<size_t>(n - j), 0.0);

    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1);
    for (const auto& [r, prob] : law) {
        for (const auto& [j, rj] : r) {
            jp.same[static_cast<size_t>(j)] +=
                prob * static_cast<double>(j * rj) * static_cast<double>(j - 1) / pairs;
            for (const auto& [k, rk] : r) {
                double ways = (j == k)
                                  ? static_cast<double>(j * rj) * static_cast<double>(j * (rj - 1))
                                  : static_cast<double>(j * rj) * static_cast<double>(k * rk);
                if (ways == 0.0 || j + k > n) continue;
                jp.diff_rows_[static_cast<size_t>(j - 1)][static_cast<size_t>(k - 1)] +=
                    prob * ways / pairs;
            }
        }
    }
    return jp;
}

double expected_rk(const WeightSequence& w, long n, long k) {
    check_cap(n, max_n, "oracle::expected_rk");
    double lhn = 0.0;
    auto law = partition_law(w, n, &lhn);
    if (num::is_neg_inf(lhn))
        throw ModelUndefinedError("oracle: h_n = 0 at n=" + std::to_string(n));
    double e = 0.0;
    for (const auto& [r, prob] : law) {
        auto it = r.find(k);
        if (it != r.end()) e += prob * static_cast<double>(it->second);
    }
    return e;
}

std::map<std::string, double> cycle_type_law(const WeightSequence& w, long n) {
    check_cap(n, max_n, "oracle::cycle_type_law");
    double lhn = 0.0;
    auto law = partition_law(w, n, &lhn);
    if (num::is_neg_inf(lhn))
        throw ModelUndefinedError("oracle: h_n = 0 at n=" + std::to_string(n));
    std::map<std::string, double> out;
    for (const auto& [r, prob] : law) {
        if (prob == 0.0) continue;
        CycleType ct;
        ct.n = n;
        ct.r = r;
        out[cycle_type_key(ct)] = prob;
    }
    return out;
}

bool permutation_check(const WeightSequence& w, long n) {
    check_cap(n, max_perm_n, "oracle::permutation_check");

    // Aggregate prod theta_j^{r_j} over all permutations, grouped by type.
    std::map<std::string, long double> by_type;
    std::vector<long> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 1L);
    do {
        CycleType ct = cycle_type_of_permutation(perm);
        long double weight = 1.0L;
        for (const auto& [j, rj] : ct.r) {
            double lt = w.log_theta(j);
            if (num::is_neg_inf(lt)) {
                weight = 0.0L;
                break;
            }
            weight *= std::pow(static_cast<long double>(std::exp(lt)),
                               static_cast<long double>(rj));
        }
        by_type[cycle_type_key(ct)] += weight;
    } while (std::next_permutation(perm.begin(), perm.end()));

    const double n_fact = std::tgamma(static_cast<double>(n) + 1.0);
    long double grand_total = 0.0L;
    bool ok = true;
    enumerate_partitions(n, [&](std::span<const long> parts) {
        auto r = occupation(parts);
        CycleType ct;
        ct.n = n;
        ct.r = r;
        // n! * prod (1/r_j!) (theta_j / j)^{r_j}
        double lw = partition_log_weight(w, r);
        double expect = num::is_neg_inf(lw) ? 0.0 : n_fact * std::exp(lw);
        double got = static_cast<double>(by_type[cycle_type_key(ct)]);
        grand_total += by_type[cycle_type_key(ct)];
        if (std::abs(got - expect) > 1e-10 * std::max({1.0, got, expect})) ok = false;
    });

    double lhn = log_hn(w, n);
    double hn = num::is_neg_inf(lhn) ? 0.0 : std::exp(lhn);
    double total = static_cast<double>(grand_total) / n_fact;
    if (std::abs(total - hn) > 1e-10 * std::max({1.0, total, hn})) ok = false;
    return ok;
}

} // namespace cw::oracle
