#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "cycleweights/cycle_type.hpp"
#include "cycleweights/exact_dist.hpp"
#include "cycleweights/weights.hpp"

// Exhaustive ground truth for small n, by direct summation over all
// partitions (and, for permutation_check, over all permutations) using
//   P(lambda) = (1/h_n) prod_j (1/r_j!) (theta_j / j)^{r_j}.
// Deliberately shares no summation code with the main pipeline: this is the
// independent side of every equivalence test.
namespace cw::oracle {

inline constexpr long max_n = 30;        // partition enumeration cap
inline constexpr long max_joint_n = 10;  // dense joint law cap
inline constexpr long max_perm_n = 7;    // n! enumeration cap

// Every partition of n exactly once, parts descending, reverse-lexicographic
// order: n first, all-ones last.
void enumerate_partitions(long n, const std::function<void(std::span<const long>)>& emit);

long partition_count(long n);

double log_hn(const WeightSequence& w, long n);

// Pushforward of the partition law: P(ell_1 = j | lambda) = j r_j / n.
LengthPMF ell1_pmf(const WeightSequence& w, long n);

// Ordered-pair counting per partition: same cycle j r_j (j-1); different
// cycles j r_j * k r_k (k != j) or j r_j * j (r_j - 1) (k = j).
JointPMF joint(const WeightSequence& w, long n);

double expected_rk(const WeightSequence& w, long n, long k);

// Full cycle-type law, keyed by cycle_type_key. The reference law for
// sampler goodness-of-fit tests.
std::map<std::string, double> cycle_type_law(const WeightSequence& w, long n);

// Enumerates all n! permutations, aggregates prod_j theta_j^{r_j} by cycle
// type, and checks the aggregate against n! * prod_j (1/r_j!)(theta_j/j)^{r_j}
// (and the grand total against h_n). True when everything agrees to 1e-10
// relative.
bool permutation_check(const WeightSequence& w, long n);

} // namespace cw::oracle
