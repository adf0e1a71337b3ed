#pragma once
// Independent reference implementations used as test oracles. Written
// directly from the mechanism definitions, sharing no code with the library.

#include <algorithm>
#include <numeric>
#include <vector>

#include "rankdep/core.hpp"
#include "rankdep/money.hpp"
#include "rankdep/prng.hpp"

namespace oracle {

using Lists = std::vector<std::vector<int>>;

inline Lists lists_of(const std::vector<rankdep::RankList>& r) {
    Lists out;
    for (const auto& x : r) out.push_back(x.order());
    return out;
}

/// order[k] = agent picking k-th.
inline std::vector<int> serial_dictatorship(const Lists& lists, const std::vector<int>& order) {
    const int n = static_cast<int>(lists.size());
    std::vector<int> got(n, -1);
    std::vector<bool> taken(n, false);
    for (int agent : order)
        for (int g : lists[agent])
            if (!taken[g]) {
                taken[g] = true;
                got[agent] = g;
                break;
            }
    return got;
}

/// Immediate acceptance. priority[k] = agent with the k-th best tie-break number.
inline std::vector<int> immediate_acceptance(const Lists& lists, const std::vector<int>& priority) {
    const int n = static_cast<int>(lists.size());
    std::vector<int> got(n, -1);
    std::vector<bool> taken(n, false);
    for (int round = 0; round < n; ++round)
        for (int g = 0; g < n; ++g) {
            if (taken[g]) continue;
            for (int agent : priority)
                if (got[agent] < 0 && lists[agent][round] == g) {
                    got[agent] = g;
                    taken[g] = true;
                    break;
                }
        }
    return got;
}

inline int rank_of(const std::vector<int>& list, int g) {
    return static_cast<int>(std::find(list.begin(), list.end(), g) - list.begin()) + 1;
}

/// No other matching makes someone strictly better off by reported rank without hurting anyone.
inline bool pareto_by_enumeration(const Lists& lists, const std::vector<int>& got) {
    const int n = static_cast<int>(lists.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool weakly = true, strictly = false;
        for (int i = 0; i < n && weakly; ++i) {
            const int a = rank_of(lists[i], perm[i]), b = rank_of(lists[i], got[i]);
            if (a > b) weakly = false;
            if (a < b) strictly = true;
        }
        if (weakly && strictly) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return true;
}

/// Expected utility (cents, exact) averaged over all n! orders.
inline std::vector<rankdep::Rational> expected_utilities(bool boston, const Lists& lists,
                                                         const std::vector<std::vector<std::int64_t>>& v,
                                                         const std::vector<std::int64_t>& rho) {
    const int n = static_cast<int>(lists.size());
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::int64_t> sum(n, 0);
    std::int64_t count = 0;
    do {
        const auto got = boston ? immediate_acceptance(lists, perm) : serial_dictatorship(lists, perm);
        for (int i = 0; i < n; ++i) sum[i] += v[i][got[i]] + rho[rank_of(lists[i], got[i]) - 1];
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<rankdep::Rational> out;
    for (auto s : sum) out.emplace_back(s, count);
    return out;
}

inline Lists random_lists(int n, rankdep::PhiloxStream& rng) {
    Lists out(n, std::vector<int>(n));
    for (auto& l : out) {
        std::iota(l.begin(), l.end(), 0);
        rng.shuffle(std::span<int>(l));
    }
    return out;
}

}  // namespace oracle
