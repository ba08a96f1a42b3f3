#include "cycleweights/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

namespace cw {

RandomSource::RandomSource(uint64_t seed, uint64_t stream_id) : seed_(seed), stream_(stream_id) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                      static_cast<uint32_t>(stream_id), static_cast<uint32_t>(stream_id >> 32)};
    eng_.seed(seq);
}

double RandomSource::next_unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

uint64_t RandomSource::next_below(uint64_t k) {
    if (k == 0) throw std::invalid_argument("next_below: k must be > 0");
    uint64_t limit = UINT64_MAX - UINT64_MAX % k;
    uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % k;
}

namespace {

CycleType sample_impl(const NormTable& t, const std::vector<double>& lt,
                      const std::vector<long>& keys, long n, RandomSource& rng) {
    const bool adaptive = t.policy.kind == TruncationPolicy::Kind::adaptive;
    CycleType ct;
    ct.n = n;

    std::vector<double> wbuf;
    std::vector<long> jbuf;
    long m = n;
    while (m > 0) {
        wbuf.clear();
        jbuf.clear();
        double best = num::neg_inf;
        long argmax = 0;
        auto consider = [&](long j) -> bool { // returns false to stop the scan
            double term = lt[static_cast<size_t>(j)] + t.log_h[static_cast<size_t>(m - j)];
            if (num::is_neg_inf(term)) return true;
            if (term > best) {
                best = term;
                argmax = j;
            } else if (adaptive && j > argmax && term < best - t.policy.drop_threshold) {
                return false;
            }
            wbuf.push_back(term);
            jbuf.push_back(j);
            return true;
        };
        if (!keys.empty()) {
            for (long j : keys) {
                if (j > m) break;
                consider(j);
            }
        } else {
            for (long j = 1; j <= m; ++j)
                if (!consider(j)) break;
        }

        double total = 0.0;
        for (double& x : wbuf) {
            x = std::exp(x - best);
            total += x;
        }
        double target = rng.next_unit() * total;
        size_t pick = wbuf.size() - 1; // guard against accumulated rounding
        double cum = 0.0;
        for (size_t i = 0; i < wbuf.size(); ++i) {
            cum += wbuf[i];
            if (target < cum) {
                pick = i;
                break;
            }
        }
        long j = jbuf[pick];
        ct.r[j] += 1;
        m -= j;
    }
    return ct;
}

} // namespace

CycleType sample_cycle_type(const NormTable& t, const WeightSequence& w, long n,
                            RandomSource& rng) {
    if (t.weights_id != w.descriptor())
        throw std::invalid_argument("sample_cycle_type: table/weights mismatch");
    if (n < 1 || n > t.N) throw std::invalid_argument("sample_cycle_type: n outside table range");
    if (num::is_neg_inf(t.log_h[static_cast<size_t>(n)]))
        throw ModelUndefinedError("h_n = 0 at n=" + std::to_string(n) +
                                  "; nothing to sample");
    std::vector<long> keys;
    if (const FiniteSupport* fs = w.finite())
        for (const auto& [j, v] : fs->theta) keys.push_back(j);
    return sample_impl(t, log_theta_row(w, n), keys, n, rng);
}

std::vector<long> realize_permutation(const CycleType& ct, RandomSource& rng) {
    if (!ct.valid()) throw std::invalid_argument("realize_permutation: invalid cycle type");
    const long n = ct.n;
    std::vector<long> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 1L);
    for (long i = n - 1; i > 0; --i)
        std::swap(order[static_cast<size_t>(i)],
                  order[rng.next_below(static_cast<uint64_t>(i) + 1)]);

    std::vector<long> perm(static_cast<size_t>(n));
    size_t pos = 0;
    for (const auto& [j, rj] : ct.r) {
        for (long c = 0; c < rj; ++c) {
            for (long i = 0; i < j; ++i) {
                long from = order[pos + static_cast<size_t>(i)];
                long to = order[pos + static_cast<size_t>((i + 1) % j)];
                perm[static_cast<size_t>(from - 1)] = to;
            }
            pos += static_cast<size_t>(j);
        }
    }
    return perm;
}

long sample_ell1(const CycleType& ct, RandomSource& rng) {
    if (!ct.valid()) throw std::invalid_argument("sample_ell1: invalid cycle type");
    double target = rng.next_unit() * static_cast<double>(ct.n);
    double cum = 0.0;
    long last = 0;
    for (const auto& [j, rj] : ct.r) {
        cum += static_cast<double>(j * rj);
        last = j;
        if (target < cum) return j;
    }
    return last;
}

std::vector<CycleType> sample_many(const NormTable& t, const WeightSequence& w, long n,
                                   long count, uint64_t seed, int threads) {
    if (count < 0) throw std::invalid_argument("sample_many: count must be >= 0");
    if (t.weights_id != w.descriptor())
        throw std::invalid_argument("sample_many: table/weights mismatch");
    if (n < 1 || n > t.N) throw std::invalid_argument("sample_many: n outside table range");
    if (num::is_neg_inf(t.log_h[static_cast<size_t>(n)]))
        throw ModelUndefinedError("h_n = 0 at n=" + std::to_string(n) + "; nothing to sample");

    const std::vector<double> lt = log_theta_row(w, n);
    std::vector<long> keys;
    if (const FiniteSupport* fs = w.finite())
        for (const auto& [j, v] : fs->theta) keys.push_back(j);

    std::vector<CycleType> out(static_cast<size_t>(count));
    auto chunk = [&](long first) {
        for (long i = first; i < count; i += std::max(threads, 1)) {
            RandomSource rs(seed, static_cast<uint64_t>(i));
            out[static_cast<size_t>(i)] = sample_impl(t, lt, keys, n, rs);
        }
    };
    if (threads <= 1) {
        chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int k = 0; k < threads; ++k) pool.emplace_back(chunk, static_cast<long>(k));
        for (auto& th : pool) th.join();
    }
    return out;
}

std::map<std::string, long> count_cycle_types(const std::vector<CycleType>& samples) {
    std::map<std::string, long> counts;
    for (const auto& ct : samples) counts[cycle_type_key(ct)] += 1;
    return counts;
}

double empirical_tv(const std::vector<CycleType>& samples,
                    const std::map<std::string, double>& exact) {
    if (samples.empty()) throw std::invalid_argument("empirical_tv: no samples");
    auto counts = count_cycle_types(samples);
    const double N = static_cast<double>(samples.size());
    double l1 = 0.0;
    for (const auto& [key, p] : exact) {
        auto it = counts.find(key);
        double emp = it == counts.end() ? 0.0 : static_cast<double>(it->second) / N;
        l1 += std::abs(emp - p);
    }
    for (const auto& [key, c] : counts)
        if (!exact.count(key)) l1 += static_cast<double>(c) / N;
    return 0.5 * l1;
}

double empirical_tv_ell1(const std::vector<CycleType>& samples, const LengthPMF& exact) {
    if (samples.empty()) throw std::invalid_argument("empirical_tv_ell1: no samples");
    std::vector<double> emp(static_cast<size_t>(exact.n) + 1, 0.0);
    const double N = static_cast<double>(samples.size());
    for (const auto& ct : samples) {
        if (ct.n != exact.n) throw std::invalid_argument("empirical_tv_ell1: size mismatch");
        for (const auto& [j, rj] : ct.r)
            emp[static_cast<size_t>(j)] +=
                static_cast<double>(j * rj) / (static_cast<double>(ct.n) * N);
    }
    double l1 = 0.0;
    for (long j = 1; j <= exact.n; ++j)
        l1 += std::abs(emp[static_cast<size_t>(j)] - exact.p(j));
    return 0.5 * l1;
}

GofResult chi_square_gof(const std::map<std::string, long>& counts,
                         const std::map<std::string, double>& probs, long n_samples,
                         double min_expected) {
    GofResult res;
    for (const auto& [key, c] : counts) {
        if (!probs.count(key) && c > 0) {
            // observed an impossible category
            res.statistic = std::numeric_limits<double>::infinity();
            res.p_value = 0.0;
            return res;
        }
    }
    double pooled_exp = 0.0;
    long pooled_obs = 0;
    double stat = 0.0;
    long bins = 0;
    for (const auto& [key, p] : probs) {
        double expect = p * static_cast<double>(n_samples);
        auto it = counts.find(key);
        long obs = it == counts.end() ? 0 : it->second;
        if (expect < min_expected) {
            pooled_exp += expect;
            pooled_obs += obs;
            continue;
        }
        double d = static_cast<double>(obs) - expect;
        stat += d * d / expect;
        ++bins;
    }
    if (pooled_exp > 0) {
        double d = static_cast<double>(pooled_obs) - pooled_exp;
        stat += d * d / pooled_exp;
        ++bins;
    }
    res.statistic = stat;
    res.bins = bins;
    res.df = bins - 1;
    if (res.df < 1) {
        res.p_value = 1.0; // degenerate law, nothing to reject
        return res;
    }
    boost::math::chi_squared dist(static_cast<double>(res.df));
    res.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    return res;
}

} // namespace cw
