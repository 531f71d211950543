#pragma once

// Exact maximum coverage by enumerating every k-subset of candidate sets.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

namespace oracle {

/// sets[i] lists the element ids covered by candidate i.
inline std::size_t union_size(const std::vector<std::set<int>>& sets, const std::vector<std::size_t>& pick) {
    std::set<int> u;
    for (std::size_t i : pick) u.insert(sets[i].begin(), sets[i].end());
    return u.size();
}

inline std::size_t best_cover(const std::vector<std::set<int>>& sets, std::size_t k) {
    const std::size_t n = sets.size();
    k = std::min(k, n);
    std::size_t best = 0;
    std::vector<std::size_t> pick;
    // Iterate over bitmasks with exactly k bits.
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        pick.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) pick.push_back(i);
        best = std::max(best, union_size(sets, pick));
    }
    return best;
}

}  // namespace oracle
