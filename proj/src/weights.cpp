#include "cycleweights/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cw {

namespace {

double delta_at(const DeltaRule& rule, long j) {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, GeometricDelta>) {
                return r.a * std::pow(r.rho, static_cast<double>(j));
            } else if constexpr (std::is_same_v<T, PowerDelta>) {
                return r.a * std::pow(static_cast<double>(j), r.p);
            } else {
                return j == r.j0 ? r.a : 0.0;
            }
        },
        rule);
}

void validate_family(const Family& family) {
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Ewens>) {
                if (!(f.theta > 0)) throw std::invalid_argument("ewens: theta must be > 0");
            } else if constexpr (std::is_same_v<T, PerturbedEwens>) {
                if (!(f.theta > 0)) throw std::invalid_argument("perturbed: theta must be > 0");
                std::visit(
                    [&](const auto& r) {
                        using R = std::decay_t<decltype(r)>;
                        if constexpr (std::is_same_v<R, GeometricDelta>) {
                            if (!(std::abs(r.rho) < 1))
                                throw std::invalid_argument("perturbed: |rho| must be < 1");
                            if (f.theta - std::abs(r.a * r.rho) < 0)
                                throw std::invalid_argument("perturbed: weights may go negative");
                        } else if constexpr (std::is_same_v<R, PowerDelta>) {
                            if (!(r.p < -1)) throw std::invalid_argument("perturbed: p must be < -1");
                            if (f.theta - std::abs(r.a) < 0)
                                throw std::invalid_argument("perturbed: weights may go negative");
                        } else {
                            if (r.j0 < 1) throw std::invalid_argument("perturbed: j0 must be >= 1");
                            if (f.theta + r.a < 0)
                                throw std::invalid_argument("perturbed: weights may go negative");
                        }
                    },
                    f.delta);
            } else if constexpr (std::is_same_v<T, PowerAlpha>) {
                if (!(f.gamma > 0)) throw std::invalid_argument("power: gamma must be > 0");
            } else if constexpr (std::is_same_v<T, NegPower>) {
                if (!(f.gamma > 0)) throw std::invalid_argument("negpower: gamma must be > 0");
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                bool any = false;
                for (const auto& [j, v] : f.theta) {
                    if (j < 1) throw std::invalid_argument("finite: indices must be >= 1");
                    if (v < 0) throw std::invalid_argument("finite: weights must be >= 0");
                    any = any || v > 0;
                }
                if (!any) throw std::invalid_argument("finite: needs at least one positive weight");
            } else {
                if (!f.log_theta) throw std::invalid_argument("custom: missing rule");
            }
        },
        family);
}

Family normalized(Family family) {
    if (auto* fs = std::get_if<FiniteSupport>(&family)) {
        std::erase_if(fs->theta, [](const auto& kv) { return kv.second == 0.0; });
    }
    return family;
}

} // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

WeightSequence::WeightSequence(Family family, double shift)
    : family_(normalized(std::move(family))), shift_(shift) {
    validate_family(family_);
}

double WeightSequence::log_theta(long j) const {
    if (j < 1) throw std::invalid_argument("log_theta: j must be >= 1");
    double base = std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Ewens>) {
                return std::log(f.theta);
            } else if constexpr (std::is_same_v<T, PerturbedEwens>) {
                double v = f.theta + delta_at(f.delta, j);
                return v > 0 ? std::log(v) : num::neg_inf;
            } else if constexpr (std::is_same_v<T, PowerAlpha>) {
                return -std::pow(static_cast<double>(j), f.gamma);
            } else if constexpr (std::is_same_v<T, NegPower>) {
                return -f.gamma * std::log(static_cast<double>(j));
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                auto it = f.theta.find(j);
                return it == f.theta.end() ? num::neg_inf : std::log(it->second);
            } else {
                return f.log_theta(j);
            }
        },
        family_);
    if (num::is_neg_inf(base)) return base;
    return base - shift_ * static_cast<double>(j);
}

Regime WeightSequence::regime() const {
    return std::visit(
        [](const auto& f) -> Regime {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Ewens> || std::is_same_v<T, PerturbedEwens>) {
                return Regime::ewens_like;
            } else if constexpr (std::is_same_v<T, PowerAlpha>) {
                if (f.gamma > 1) return Regime::quickly_diverging;
                if (f.gamma == 1) return Regime::uniform_equivalent;
                return Regime::slowly_diverging;
            } else if constexpr (std::is_same_v<T, NegPower>) {
                return Regime::slowly_diverging;
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                return Regime::quickly_diverging;
            } else {
                return Regime::undetermined;
            }
        },
        family_);
}

std::string WeightSequence::descriptor() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Ewens>) {
                os << "family=ewens theta=" << format_double(f.theta);
            } else if constexpr (std::is_same_v<T, PerturbedEwens>) {
                os << "family=perturbed theta=" << format_double(f.theta) << " delta=";
                std::visit(
                    [&](const auto& r) {
                        using R = std::decay_t<decltype(r)>;
                        if constexpr (std::is_same_v<R, GeometricDelta>) {
                            os << "geom:" << format_double(r.a) << ":" << format_double(r.rho);
                        } else if constexpr (std::is_same_v<R, PowerDelta>) {
                            os << "pow:" << format_double(r.a) << ":" << format_double(r.p);
                        } else {
                            os << "single:" << r.j0 << ":" << format_double(r.a);
                        }
                    },
                    f.delta);
            } else if constexpr (std::is_same_v<T, PowerAlpha>) {
                os << "family=power gamma=" << format_double(f.gamma);
            } else if constexpr (std::is_same_v<T, NegPower>) {
                os << "family=negpower gamma=" << format_double(f.gamma);
            } else if constexpr (std::is_same_v<T, FiniteSupport>) {
                os << "family=finite support=";
                bool first = true;
                for (const auto& [j, v] : f.theta) {
                    if (!first) os << ",";
                    first = false;
                    os << j << ":" << format_double(v);
                }
            } else {
                os << "family=custom name=" << f.name;
            }
        },
        family_);
    if (shift_ != 0.0) os << " shift=" << format_double(shift_);
    return os.str();
}

WeightSequence shift_weights(const WeightSequence& w, double c) {
    return WeightSequence(w.family(), w.shift() + c);
}

namespace {

double parse_num(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("bad numeric value for ") + what + ": " + s);
    }
}

long parse_long(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("bad integer value for ") + what + ": " + s);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

WeightSequence parse_weights(const std::string& config) {
    std::map<std::string, std::string> kv;
    std::istringstream is(config);
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("weights config: expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument(std::string("weights config: missing ") + key);
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    std::string fam = take("family");
    double shift = 0.0;
    if (auto it = kv.find("shift"); it != kv.end()) {
        shift = parse_num(it->second, "shift");
        kv.erase(it);
    }

    Family family;
    if (fam == "ewens") {
        family = Ewens{parse_num(take("theta"), "theta")};
    } else if (fam == "power") {
        family = PowerAlpha{parse_num(take("gamma"), "gamma")};
    } else if (fam == "negpower") {
        family = NegPower{parse_num(take("gamma"), "gamma")};
    } else if (fam == "finite") {
        FiniteSupport fs;
        for (const auto& item : split(take("support"), ',')) {
            auto pair = split(item, ':');
            if (pair.size() == 1) {
                fs.theta[parse_long(pair[0], "support index")] = 1.0;
            } else if (pair.size() == 2) {
                fs.theta[parse_long(pair[0], "support index")] = parse_num(pair[1], "support weight");
            } else {
                throw std::invalid_argument("weights config: bad support entry '" + item + "'");
            }
        }
        family = std::move(fs);
    } else if (fam == "perturbed") {
        double theta = parse_num(take("theta"), "theta");
        auto parts = split(take("delta"), ':');
        if (parts.size() != 3) throw std::invalid_argument("weights config: delta must be kind:x:y");
        DeltaRule rule;
        if (parts[0] == "geom") {
            rule = GeometricDelta{parse_num(parts[1], "delta a"), parse_num(parts[2], "delta rho")};
        } else if (parts[0] == "pow") {
            rule = PowerDelta{parse_num(parts[1], "delta a"), parse_num(parts[2], "delta p")};
        } else if (parts[0] == "single") {
            rule = SingleDelta{parse_long(parts[1], "delta j0"), parse_num(parts[2], "delta a")};
        } else {
            throw std::invalid_argument("weights config: unknown delta kind '" + parts[0] + "'");
        }
        family = PerturbedEwens{theta, rule};
    } else {
        throw std::invalid_argument("weights config: unknown family '" + fam + "'");
    }
    if (!kv.empty())
        throw std::invalid_argument("weights config: unexpected key '" + kv.begin()->first + "'");
    return WeightSequence(std::move(family), shift);
}

std::vector<double> log_theta_row(const WeightSequence& w, long N) {
    std::vector<double> row(static_cast<size_t>(N) + 1, num::neg_inf);
    for (long j = 1; j <= N; ++j) row[static_cast<size_t>(j)] = w.log_theta(j);
    return row;
}

// ---------------------------------------------------------------------------
// Hypothesis checks
// ---------------------------------------------------------------------------

namespace {

// Witness c_j for the giant-cycle ratio bound, where family knowledge
// provides one. The bound must hold for every n and j <= n/2; the worst case
// over n sits at n = 2j, which is where these constants come from.
double giant_witness(const Family& family, long j) {
    if (const auto* np = std::get_if<NegPower>(&family)) {
        // (j (1 - j/n))^{-g} <= (j/2)^{-g}
        return std::pow(2.0, np->gamma) * std::pow(static_cast<double>(j), -np->gamma);
    }
    if (const auto* pa = std::get_if<PowerAlpha>(&family)) {
        // n^g [(1-x)^g + x^g - 1] >= (1 - 2^{g-1}) j^g for x = j/n <= 1/2
        double kappa = 1.0 - std::pow(2.0, pa->gamma - 1.0);
        return std::exp(-kappa * std::pow(static_cast<double>(j), pa->gamma));
    }
    return 0.0;
}

} // namespace

HypothesisReport check_hypotheses(const WeightSequence& w, long probe_depth) {
    if (probe_depth < 10) throw std::invalid_argument("check_hypotheses: probe_depth must be >= 10");
    HypothesisReport rep;

    // Support gcd over what we can see.
    if (const auto* fs = w.finite()) {
        long g = 0;
        for (const auto& [j, v] : fs->theta) g = std::gcd(g, j);
        rep.support_gcd = g;
    } else {
        long g = 0;
        for (long j = 1; j <= probe_depth; ++j)
            if (w.in_support(j)) g = std::gcd(g, j);
        rep.support_gcd = g;
    }

    const Family& fam = w.family();
    const bool custom = std::holds_alternative<Custom>(fam);

    // Giant cycle (shift-invariant: the ratio theta_{n-j} theta_j / theta_n
    // is unchanged under alpha_j -> alpha_j + c j).
    if (custom) {
        rep.giant_cycle_ok = Cert::undetermined;
    } else if (std::holds_alternative<NegPower>(fam) ||
               (std::holds_alternative<PowerAlpha>(fam) && std::get<PowerAlpha>(fam).gamma < 1)) {
        rep.giant_cycle_ok = Cert::yes;
        num::KahanSum partial;
        for (long j = 1; j <= probe_depth; ++j) {
            double cj = giant_witness(fam, j);
            rep.giant_c.push_back(cj);
            partial.add(cj / static_cast<double>(j));
        }
        rep.giant_partial_sum = partial.value();
    } else {
        rep.giant_cycle_ok = Cert::no;
    }

    // Ewens-like tail. Shifting destroys theta_j -> theta, so an applied
    // shift makes the as-given sequence fail this hypothesis.
    if (custom) {
        rep.ewens_ok = Cert::undetermined;
    } else if (w.shift() == 0.0 && std::holds_alternative<Ewens>(fam)) {
        rep.ewens_ok = Cert::yes;
        rep.ewens_theta = std::get<Ewens>(fam).theta;
        rep.ewens_tail_bound = 0.0;
    } else if (w.shift() == 0.0 && std::holds_alternative<PerturbedEwens>(fam)) {
        const auto& pe = std::get<PerturbedEwens>(fam);
        rep.ewens_ok = Cert::yes;
        rep.ewens_theta = pe.theta;
        rep.ewens_tail_bound = std::visit(
            [&](const auto& r) -> double {
                using R = std::decay_t<decltype(r)>;
                double J = static_cast<double>(probe_depth);
                if constexpr (std::is_same_v<R, GeometricDelta>) {
                    double q = std::abs(r.rho);
                    return std::abs(r.a) * std::pow(q, J + 1) / (1 - q);
                } else if constexpr (std::is_same_v<R, PowerDelta>) {
                    return std::abs(r.a) * std::pow(J, r.p + 1) / (-r.p - 1);
                } else {
                    return r.j0 <= probe_depth ? 0.0 : std::abs(r.a);
                }
            },
            pe.delta);
    } else {
        rep.ewens_ok = Cert::no;
    }

    // Quick regime: theta_k <= e^{Mk}/k! plus a coprime support pair >= 4.
    // Shift folds into M, so the witness is computed on evaluated weights.
    auto quick_M_over = [&](const std::vector<long>& ks) {
        double M = 1e-6;
        for (long k : ks) {
            double lt = w.log_theta(k);
            if (num::is_neg_inf(lt)) continue;
            M = std::max(M, (lt + std::lgamma(static_cast<double>(k) + 1)) / static_cast<double>(k));
        }
        return M;
    };
    if (custom) {
        rep.quick_ok = Cert::undetermined;
    } else if (const auto* pa = std::get_if<PowerAlpha>(&fam); pa && pa->gamma > 1) {
        std::vector<long> ks;
        for (long k = 1; k <= std::max(probe_depth, 64L); ++k) ks.push_back(k);
        rep.quick_ok = Cert::yes;
        rep.quick_M = quick_M_over(ks);
        rep.coprime_j1 = 4;
        rep.coprime_j2 = 5;
    } else if (const auto* fs = w.finite()) {
        std::vector<long> keys;
        for (const auto& [j, v] : fs->theta) keys.push_back(j);
        long j1 = 0, j2 = 0;
        for (size_t a = 0; a < keys.size() && j1 == 0; ++a) {
            if (keys[a] < 4) continue;
            for (size_t b = a + 1; b < keys.size(); ++b) {
                if (std::gcd(keys[a], keys[b]) == 1) {
                    j1 = keys[a];
                    j2 = keys[b];
                    break;
                }
            }
        }
        if (j1 != 0) {
            rep.quick_ok = Cert::yes;
            rep.quick_M = quick_M_over(keys);
            rep.coprime_j1 = j1;
            rep.coprime_j2 = j2;
        } else {
            rep.quick_ok = Cert::no;
        }
    } else {
        rep.quick_ok = Cert::no;
    }

    return rep;
}

} // namespace cw
