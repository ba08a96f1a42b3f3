#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "cycleweights/cycle_type.hpp"
#include "cycleweights/exact_dist.hpp"

namespace cw {

// Reproducible randomness: identical (seed, stream_id) replays the identical
// draw sequence on any platform and thread count. Streams are independent;
// parallel consumers must each own a distinct stream, never share one.
class RandomSource {
  public:
    RandomSource(uint64_t seed, uint64_t stream_id);

    // Uniform in [0,1), 53 random bits. Derived manually from the engine so
    // the sequence does not depend on the standard library's distribution
    // implementations.
    double next_unit();

    // Uniform in {0, ..., k-1}, unbiased (rejection).
    uint64_t next_below(uint64_t k);

    uint64_t seed() const { return seed_; }
    uint64_t stream_id() const { return stream_; }

  private:
    uint64_t seed_;
    uint64_t stream_;
    std::mt19937_64 eng_;
};

// Draws a cycle type exactly from the weighted measure by iterating the
// size-biased length law: at remaining size m, the cycle containing the
// smallest unplaced index has length j with probability
// theta_j h_{m-j} / (m h_m); remove it and recurse on m - j. The conditional
// model on the remaining indices is the same model at size m - j, so the
// telescoped draw has exactly the cycle-type law at size n.
//
// Per step: one linear cumulative scan over j, in linear scale after
// subtracting the step's max log term. With an adaptive table the scan stops
// in the same truncation window the table used; the neglected mass (below
// e^{-drop_threshold} relative) is renormalized away.
CycleType sample_cycle_type(const NormTable& t, const WeightSequence& w, long n,
                            RandomSource& rng);

// Uniform over the n!/(prod_j j^{r_j} r_j!) permutations with the given
// cycle type: shuffle 1..n, cut into cycles. Returns 1-based images.
std::vector<long> realize_permutation(const CycleType& ct, RandomSource& rng);

// Length of the cycle containing index 1, conditional on the type:
// P(ell_1 = j | ct) = j r_j / n.
long sample_ell1(const CycleType& ct, RandomSource& rng);

// count samples, sample i drawn from its own stream (seed, i). The result is
// independent of the worker count, so parallel and serial runs replay
// byte-identically.
std::vector<CycleType> sample_many(const NormTable& t, const WeightSequence& w, long n,
                                   long count, uint64_t seed, int threads = 1);

// --- diagnostics -------------------------------------------------------------

// Total-variation distance between the empirical cycle-type distribution and
// an exact law keyed by cycle_type_key.
double empirical_tv(const std::vector<CycleType>& samples,
                    const std::map<std::string, double>& exact);

// TV between the ell_1 pushforward of the samples and an exact length law.
// Each sample contributes its conditional law j r_j / n.
double empirical_tv_ell1(const std::vector<CycleType>& samples, const LengthPMF& exact);

struct GofResult {
    double statistic = 0.0;
    long df = 0;
    double p_value = 1.0;
    long bins = 0; // after pooling
};

// Pearson chi-square against an exact categorical law. Categories whose
// expected count falls below min_expected are pooled into one bin.
GofResult chi_square_gof(const std::map<std::string, long>& counts,
                         const std::map<std::string, double>& probs, long n_samples,
                         double min_expected = 5.0);

std::map<std::string, long> count_cycle_types(const std::vector<CycleType>& samples);

} // namespace cw
