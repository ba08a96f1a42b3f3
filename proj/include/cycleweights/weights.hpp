#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cycleweights/numeric.hpp"

namespace cw {

// ---------------------------------------------------------------------------
// Weight families.
//
// A weight sequence assigns a nonnegative weight theta_j to every cycle
// length j >= 1. Everything downstream evaluates log theta_j; theta_j = 0 is
// represented by -inf so that log-domain sums can simply skip those terms.
// The statistical-mechanics parametrization alpha_j = -log theta_j is used
// where it reads more naturally (PowerAlpha, shifts).
// ---------------------------------------------------------------------------

// Constant weights theta_j = theta (theta > 0).
struct Ewens {
    double theta;
};

// Perturbation rules for near-constant weights theta_j = theta + delta_j.
// Only absolutely summable closed forms are admitted, so that the tail of
// sum |theta_j - theta| (and of sum |theta_j - theta| / j) can be certified.
struct GeometricDelta {
    double a;   // delta_j = a * rho^j
    double rho; // |rho| < 1
};
struct PowerDelta {
    double a; // delta_j = a * j^p
    double p; // p < -1
};
struct SingleDelta {
    long j0;  // delta_{j0} = a, zero elsewhere
    double a;
};
using DeltaRule = std::variant<GeometricDelta, PowerDelta, SingleDelta>;

struct PerturbedEwens {
    double theta;
    DeltaRule delta;
};

// alpha_j = j^gamma, i.e. theta_j = exp(-j^gamma), gamma > 0.
struct PowerAlpha {
    double gamma;
};

// theta_j = j^{-gamma}, gamma > 0.
struct NegPower {
    double gamma;
};

// Finitely many nonzero weights, given explicitly. Zero entries are dropped
// at construction; at least one positive entry is required.
struct FiniteSupport {
    std::map<long, double> theta;
};

// Arbitrary deterministic rule j -> log theta_j. Regime checks cannot
// certify anything about it; they report "undetermined".
struct Custom {
    std::string name;
    std::function<double(long)> log_theta;
};

using Family = std::variant<Ewens, PerturbedEwens, PowerAlpha, NegPower, FiniteSupport, Custom>;

// Broad regime of a family, decided from family knowledge alone.
enum class Regime {
    ewens_like,         // theta_j -> theta > 0
    slowly_diverging,   // alpha_j -> inf sublinearly (giant cycle)
    quickly_diverging,  // theta_j decays superexponentially; entire I_0
    uniform_equivalent, // alpha_j = c*j exactly (gauge copy of uniform)
    undetermined,
};

class WeightSequence {
  public:
    explicit WeightSequence(Family family, double shift = 0.0);

    // log theta_j; -inf exactly when theta_j = 0. Total for j >= 1.
    double log_theta(long j) const;
    bool in_support(long j) const { return !num::is_neg_inf(log_theta(j)); }

    // alpha_j -> alpha_j + c*j applied on top of the base family.
    double shift() const { return shift_; }
    const Family& family() const { return family_; }
    Regime regime() const;

    // Canonical text form; doubles printed with 17 significant digits so the
    // descriptor uniquely identifies the family. Used as cache key and in
    // output headers, and (shift aside) parseable back via parse_weights().
    std::string descriptor() const;

    // nullptr unless the base family is FiniteSupport.
    const FiniteSupport* finite() const { return std::get_if<FiniteSupport>(&family_); }

  private:
    Family family_;
    double shift_ = 0.0;
};

WeightSequence shift_weights(const WeightSequence& w, double c);

// Parses the config text format, e.g.
//   family=ewens theta=2.0
//   family=power gamma=1.5
//   family=negpower gamma=2
//   family=finite support=4:1,5:1
//   family=perturbed theta=2 delta=geom:1:0.5   (also pow:a:p, single:j0:a)
// Optional `shift=c` applies the alpha_j += c*j transformation.
// Throws std::invalid_argument on malformed input.
WeightSequence parse_weights(const std::string& config);

// theta_j for j = 1..N, in log domain. Plain convenience batch evaluation.
std::vector<double> log_theta_row(const WeightSequence& w, long N);

// ---------------------------------------------------------------------------
// Hypothesis checks.
// ---------------------------------------------------------------------------

enum class Cert { no, yes, undetermined };

struct HypothesisReport {
    // Giant-cycle hypothesis: theta_{n-j} theta_j / theta_n <= c_j for all n,
    // j <= n/2, with sum c_j/j < inf. Shift-invariant.
    Cert giant_cycle_ok = Cert::no;
    std::vector<double> giant_c;      // witness c_j, j = 1..probe_depth
    double giant_partial_sum = 0.0;   // sum_{j<=probe_depth} c_j / j

    // Ewens hypothesis: sum |theta_j - theta|/j < inf (theta >= 1) or
    // sum |theta_j - theta| < inf (theta < 1). Not shift-invariant; reported
    // for the sequence as given.
    Cert ewens_ok = Cert::no;
    double ewens_theta = 0.0;
    double ewens_tail_bound = 0.0;    // certified bound on the neglected tail

    // Quick-regime assumptions: theta_k <= e^{Mk}/k! for all k, plus a
    // coprime support pair j1, j2 >= 4.
    Cert quick_ok = Cert::no;
    double quick_M = 0.0;
    long coprime_j1 = 0;
    long coprime_j2 = 0;

    long support_gcd = 0;             // gcd of observed support indices
};

// Advisory classification: closed-form family knowledge where available,
// numeric probes up to probe_depth otherwise. Custom families come back
// undetermined rather than guessed. Pure; probe_depth >= 10.
HypothesisReport check_hypotheses(const WeightSequence& w, long probe_depth);

// 17-significant-digit float formatting, shared by descriptors and emitters.
std::string format_double(double x);

} // namespace cw
