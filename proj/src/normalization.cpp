#include "cycleweights/normalization.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cycleweights/numeric.hpp"

namespace cw {

std::string TruncationPolicy::text() const {
    if (kind == Kind::full) return "full";
    return "adaptive:" + format_double(drop_threshold);
}

std::optional<TruncationPolicy> parse_policy(const std::string& text) {
    if (text == "full") return TruncationPolicy::Full();
    if (text.rfind("adaptive:", 0) == 0) {
        char* end = nullptr;
        double nats = std::strtod(text.c_str() + 9, &end);
        if (end && *end == '\0' && nats > 0) return TruncationPolicy::Adaptive(nats);
    }
    return std::nullopt;
}

NormTable build_norm_table(const WeightSequence& w, long N, TruncationPolicy policy) {
    if (N < 0) throw std::invalid_argument("build_norm_table: N must be >= 0");
    const bool adaptive = policy.kind == TruncationPolicy::Kind::adaptive;
    if (adaptive && w.regime() != Regime::quickly_diverging)
        throw HypothesisError(
            "adaptive truncation requires superexponentially decaying weights; "
            "truncation error is uncontrolled for " + w.descriptor());

    NormTable t{w.descriptor(), N, std::vector<double>(static_cast<size_t>(N) + 1, num::neg_inf),
                policy};
    t.log_h[0] = 0.0;
    if (N == 0) return t;

    const std::vector<double> lt = log_theta_row(w, N);

    // Finite support: iterate support indices only. Identical to the full
    // scan (all other terms are -inf) at O(N * support) cost.
    std::vector<long> keys;
    if (const FiniteSupport* fs = w.finite())
        for (const auto& [j, v] : fs->theta) keys.push_back(j);

    std::vector<double> buf;
    buf.reserve(static_cast<size_t>(std::min<long>(N, 4096)));
    for (long n = 1; n <= N; ++n) {
        buf.clear();
        if (!keys.empty()) {
            for (long j : keys) {
                if (j > n) break;
                double term = lt[static_cast<size_t>(j)] + t.log_h[static_cast<size_t>(n - j)];
                if (!num::is_neg_inf(term)) buf.push_back(term);
            }
        } else if (adaptive) {
            double best = num::neg_inf;
            long argmax = 0;
            for (long j = 1; j <= n; ++j) {
                double term = lt[static_cast<size_t>(j)] + t.log_h[static_cast<size_t>(n - j)];
                if (num::is_neg_inf(term)) continue;
                if (term > best) {
                    best = term;
                    argmax = j;
                } else if (j > argmax && term < best - policy.drop_threshold) {
                    break;
                }
                buf.push_back(term);
            }
        } else {
            for (long j = 1; j <= n; ++j) {
                double term = lt[static_cast<size_t>(j)] + t.log_h[static_cast<size_t>(n - j)];
                if (!num::is_neg_inf(term)) buf.push_back(term);
            }
        }
        t.log_h[static_cast<size_t>(n)] =
            num::log_sum_exp(buf) - std::log(static_cast<double>(n));
    }
    return t;
}

double ewens_log_hn(double theta, long n) {
    if (!(theta > 0)) throw std::invalid_argument("ewens_log_hn: theta must be > 0");
    if (n < 0) throw std::invalid_argument("ewens_log_hn: n must be >= 0");
    double dn = static_cast<double>(n);
    return std::lgamma(dn + theta) - std::lgamma(theta) - std::lgamma(dn + 1.0);
}

double prop22_log_constant(const WeightSequence& w) {
    HypothesisReport rep = check_hypotheses(w, 10);
    if (rep.ewens_ok != Cert::yes)
        throw HypothesisError("prop22_log_constant: Ewens hypothesis not certified for " +
                              w.descriptor());
    if (std::holds_alternative<Ewens>(w.family())) return 0.0;

    const auto& pe = std::get<PerturbedEwens>(w.family());
    return std::visit(
        [&](const auto& r) -> double {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, SingleDelta>) {
                return r.a / static_cast<double>(r.j0);
            } else if constexpr (std::is_same_v<R, GeometricDelta>) {
                double q = std::abs(r.rho);
                num::KahanSum s;
                for (long j = 1; j <= 100000000L; ++j) {
                    s.add(r.a * std::pow(r.rho, static_cast<double>(j)) / static_cast<double>(j));
                    double tail = std::abs(r.a) * std::pow(q, static_cast<double>(j) + 1) /
                                  (static_cast<double>(j + 1) * (1 - q));
                    if (tail < 1e-13) return s.value();
                }
                throw HypothesisError("prop22_log_constant: geometric tail not certifiable");
            } else {
                // sum a j^{p-1}: direct terms, then an Euler-Maclaurin tail
                // whose remainder is checked against the certification bar.
                const long J = 200000;
                num::KahanSum s;
                for (long j = 1; j <= J; ++j)
                    s.add(r.a * std::pow(static_cast<double>(j), r.p - 1.0));
                double N = static_cast<double>(J) + 1.0;
                double tail = std::pow(N, r.p) / (-r.p)            // integral from N
                              + 0.5 * std::pow(N, r.p - 1.0)       // f(N)/2
                              - (r.p - 1.0) * std::pow(N, r.p - 2.0) / 12.0;
                double remainder =
                    std::abs(r.a * (r.p - 1) * (r.p - 2) * (r.p - 3)) * std::pow(N, r.p - 4.0) / 720.0;
                if (remainder >= 1e-12)
                    throw HypothesisError("prop22_log_constant: power tail not certifiable");
                return s.value() + r.a * tail;
            }
        },
        pe.delta);
}

std::vector<double> ratio_bound_monitor(const NormTable& t, const WeightSequence& w) {
    if (t.weights_id != w.descriptor())
        throw std::invalid_argument("ratio_bound_monitor: table/weights mismatch");
    if (check_hypotheses(w, 16).giant_cycle_ok != Cert::yes)
        throw HypothesisError("ratio_bound_monitor: giant-cycle hypothesis not certified for " +
                              w.descriptor());
    std::vector<double> log_a(static_cast<size_t>(t.N) + 1, num::neg_inf);
    for (long n = 1; n <= t.N; ++n) {
        double lt = w.log_theta(n);
        if (num::is_neg_inf(lt))
            throw std::invalid_argument("ratio_bound_monitor: theta_n = 0 at n=" + std::to_string(n));
        log_a[static_cast<size_t>(n)] =
            std::log(static_cast<double>(n)) + t.log_h[static_cast<size_t>(n)] - lt;
    }
    return log_a;
}

// --- disk cache --------------------------------------------------------------

void save_norm_table(const NormTable& t, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    os << "cycleweights-norm v1 " << t.weights_id << " N=" << t.N << " policy=" << t.policy.text()
       << "\n";
    for (long n = 0; n <= t.N; ++n)
        os << n << "\t" << format_double(t.log_h[static_cast<size_t>(n)]) << "\n";
    if (!os) throw std::runtime_error("short write to " + file.string());
}

std::optional<NormTable> load_norm_table(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) return std::nullopt;
    std::string header;
    if (!std::getline(is, header)) return std::nullopt;

    const std::string magic = "cycleweights-norm v1 ";
    if (header.rfind(magic, 0) != 0) return std::nullopt;
    auto policy_at = header.rfind(" policy=");
    if (policy_at == std::string::npos) return std::nullopt;
    auto n_at = header.rfind(" N=", policy_at);
    if (n_at == std::string::npos || n_at < magic.size()) return std::nullopt;

    NormTable t;
    t.weights_id = header.substr(magic.size(), n_at - magic.size());
    try {
        t.N = std::stol(header.substr(n_at + 3, policy_at - (n_at + 3)));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    auto policy = parse_policy(header.substr(policy_at + 8));
    if (!policy || t.N < 0) return std::nullopt;
    t.policy = *policy;

    t.log_h.assign(static_cast<size_t>(t.N) + 1, num::neg_inf);
    std::string line;
    for (long n = 0; n <= t.N; ++n) {
        if (!std::getline(is, line)) return std::nullopt;
        auto tab = line.find('\t');
        if (tab == std::string::npos) return std::nullopt;
        try {
            if (std::stol(line.substr(0, tab)) != n) return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
        std::string v = line.substr(tab + 1);
        if (v == "-inf") {
            t.log_h[static_cast<size_t>(n)] = num::neg_inf;
        } else {
            char* end = nullptr;
            t.log_h[static_cast<size_t>(n)] = std::strtod(v.c_str(), &end);
            if (!end || *end != '\0') return std::nullopt;
        }
    }
    return t;
}

namespace {

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

std::string norm_cache_filename(const std::string& weights_id, long N, TruncationPolicy policy) {
    std::ostringstream key;
    key << weights_id << "|" << N << "|" << policy.text();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(key.str())));
    return std::string("cw-") + buf + ".norm";
}

NormTable cached_norm_table(const WeightSequence& w, long N, TruncationPolicy policy,
                            const std::optional<std::filesystem::path>& cache_dir) {
    if (cache_dir) {
        auto file = *cache_dir / norm_cache_filename(w.descriptor(), N, policy);
        if (auto t = load_norm_table(file);
            t && t->weights_id == w.descriptor() && t->N == N && t->policy == policy)
            return std::move(*t);
        NormTable t = build_norm_table(w, N, policy);
        std::error_code ec;
        std::filesystem::create_directories(*cache_dir, ec);
        try {
            save_norm_table(t, file);
        } catch (const std::exception&) {
            // cache is best-effort; the computed table is still good
        }
        return t;
    }
    return build_norm_table(w, N, policy);
}

} // namespace cw
