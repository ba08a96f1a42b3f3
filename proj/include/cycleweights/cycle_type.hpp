#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cw {

// Occupation numbers r_j of a permutation (or partition): r_j cycles of
// length j, with sum_j j*r_j = n. Only positive entries are stored.
struct CycleType {
    long n = 0;
    std::map<long, long> r;

    bool valid() const {
        long total = 0;
        for (const auto& [j, rj] : r) {
            if (j < 1 || rj < 1) return false;
            total += j * rj;
        }
        return total == n;
    }
};

// Canonical text form "j:r_j j:r_j ..." sorted by j; used as map key and as
// the CLI sample output format.
std::string cycle_type_key(const CycleType& ct);

// Cycle type of a permutation given as 1-based images (perm[i-1] = pi(i)).
CycleType cycle_type_of_permutation(std::span<const long> perm);

} // namespace cw
