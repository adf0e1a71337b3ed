#pragma once
// Jonckheere-Terpstra trend test and Wilcoxon rank-sum test, each with a
// normal approximation (tie-corrected, continuity 0.5) and an exact
// permutation p-value for small samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "rankdep/errors.hpp"

namespace rankdep::analysis {

inline constexpr int kExactMaxN = 12;

inline double normal_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

enum class Trend { Decreasing, Increasing };

struct JtResult {
    double statistic = 0.0;  ///< sum over ordered group pairs (i < j) of Mann-Whitney counts
    double mean = 0.0;
    double variance = 0.0;
    double p_normal = 1.0;   ///< one-sided
    std::optional<double> p_exact;
    int n = 0;
    double p() const { return p_exact ? *p_exact : p_normal; }
};

namespace detail {

/// Pairs (x in earlier group, y in later group) with x > y, ties counting 1/2; returned doubled.
inline std::int64_t jt_twice(const std::vector<std::vector<double>>& groups) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < groups.size(); ++i)
        for (std::size_t j = i + 1; j < groups.size(); ++j)
            for (double x : groups[i])
                for (double y : groups[j]) s += x > y ? 2 : x == y ? 1 : 0;
    return s;
}

inline std::vector<int> tie_sizes(std::vector<double> pooled) {
    std::sort(pooled.begin(), pooled.end());
    std::vector<int> t;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
        t.push_back(static_cast<int>(j - i));
        i = j;
    }
    return t;
}

using Count = unsigned __int128;

inline Count binomial(int n, int k) {
    Count c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<Count>(n - k + i) / static_cast<Count>(i);
    return c;
}

/// Arrangement counts must fit in 128 bits; checked in floating point first.
inline void check_count_fits(int N, const std::vector<int>& sizes) {
    long double lg = std::lgamma(static_cast<long double>(N) + 1);
    for (int n : sizes) lg -= std::lgamma(static_cast<long double>(n) + 1);
    if (N > 33 && lg > std::log(1e36L)) throw SizeError("exact Jonckheere-Terpstra enumeration too large");
}

/// Exact null distribution of the doubled JT statistic over all N!/prod(n_i!)
/// label arrangements, processing tie blocks from the largest value down.
inline std::map<std::int64_t, Count> jt_null_twice(const std::vector<int>& sizes,
                                                           const std::vector<int>& blocks_desc) {
    const int k = static_cast<int>(sizes.size());
    std::map<std::vector<int>, std::map<std::int64_t, Count>> states;
    states[std::vector<int>(k, 0)][0] = 1;
    for (int t : blocks_desc) {
        std::map<std::vector<int>, std::map<std::int64_t, Count>> next;
        for (const auto& [placed, dist] : states) {
            std::vector<int> c(k, 0);
            std::function<void(int, int)> rec = [&](int g, int left) {
                if (g == k - 1) {
                    if (placed[g] + left > sizes[g]) return;
                    c[g] = left;
                    std::int64_t add = 0, before = 0;
                    Count ways = 1;
                    int tied_before = 0, rest = t;
                    for (int j = 0; j < k; ++j) {
                        add += 2LL * c[j] * before + static_cast<std::int64_t>(c[j]) * tied_before;
                        before += placed[j];
                        tied_before += c[j];
                        ways *= binomial(rest, c[j]);
                        rest -= c[j];
                    }
                    std::vector<int> np = placed;
                    for (int j = 0; j < k; ++j) np[j] += c[j];
                    auto& nd = next[np];
                    for (const auto& [s, cnt] : dist) nd[s + add] += cnt * ways;
                    return;
                }
                for (int x = 0; x <= left && placed[g] + x <= sizes[g]; ++x) {
                    c[g] = x;
                    rec(g + 1, left - x);
                }
            };
            rec(0, t);
        }
        states = std::move(next);
    }
    return states.begin()->second;
}

}  // namespace detail

/// Groups ordered by rank. Decreasing: the alternative is that values fall with group index.
inline JtResult jonckheere_terpstra(std::vector<std::vector<double>> groups, Trend alternative = Trend::Decreasing,
                                    int exact_max_n = kExactMaxN) {
    std::erase_if(groups, [](const auto& g) { return g.empty(); });
    if (groups.size() < 2) throw ArgumentError("Jonckheere-Terpstra needs at least two non-empty groups");
    if (alternative == Trend::Increasing)
        for (auto& g : groups)
            for (double& x : g) x = -x;

    JtResult r;
    std::vector<double> pooled;
    std::vector<int> sizes;
    for (const auto& g : groups) {
        pooled.insert(pooled.end(), g.begin(), g.end());
        sizes.push_back(static_cast<int>(g.size()));
    }
    const double N = static_cast<double>(pooled.size());
    r.n = static_cast<int>(pooled.size());
    const std::int64_t twice = detail::jt_twice(groups);
    r.statistic = twice / 2.0;

    double sn2 = 0, sn_a = 0, sn_b = 0, sn_c = 0;
    for (int ni : sizes) {
        const double n = ni;
        sn2 += n * n;
        sn_a += n * (n - 1) * (2 * n + 5);
        sn_b += n * (n - 1) * (n - 2);
        sn_c += n * (n - 1);
    }
    const auto ties = detail::tie_sizes(pooled);
    double st_a = 0, st_b = 0, st_c = 0;
    for (int ti : ties) {
        const double t = ti;
        st_a += t * (t - 1) * (2 * t + 5);
        st_b += t * (t - 1) * (t - 2);
        st_c += t * (t - 1);
    }
    r.mean = (N * N - sn2) / 4.0;
    r.variance = (N * (N - 1) * (2 * N + 5) - sn_a - st_a) / 72.0;
    if (N >= 3) r.variance += sn_b * st_b / (36.0 * N * (N - 1) * (N - 2));
    if (N >= 2) r.variance += sn_c * st_c / (8.0 * N * (N - 1));
    if (r.variance <= 1e-12) {
        // All values tied: the statistic is constant under the null.
        r.variance = 0.0;
        r.p_normal = 1.0;
    } else {
        r.p_normal = normal_upper((r.statistic - r.mean - 0.5) / std::sqrt(r.variance));
    }

    if (r.n <= exact_max_n) {
        std::vector<double> desc = pooled;
        std::sort(desc.begin(), desc.end(), std::greater<>());
        std::vector<int> blocks;
        for (std::size_t i = 0; i < desc.size();) {
            std::size_t j = i;
            while (j < desc.size() && desc[j] == desc[i]) ++j;
            blocks.push_back(static_cast<int>(j - i));
            i = j;
        }
        detail::check_count_fits(r.n, sizes);
        const auto dist = detail::jt_null_twice(sizes, blocks);
        detail::Count total = 0, tail = 0;
        for (const auto& [s, c] : dist) {
            total += c;
            if (s >= twice) tail += c;
        }
        r.p_exact = static_cast<double>(static_cast<long double>(tail) / static_cast<long double>(total));
    }
    return r;
}

struct WilcoxonResult {
    double statistic = 0.0;  ///< rank sum of sample a (midranks)
    double expected = 0.0;
    double variance = 0.0;
    double p_normal = 1.0;   ///< two-sided
    std::optional<double> p_exact;
    double p_greater_normal = 1.0;  ///< one-sided, alternative: a tends to exceed b
    std::optional<double> p_greater_exact;
    int n = 0;
    double p() const { return p_exact ? *p_exact : p_normal; }
};

inline WilcoxonResult wilcoxon_ranksum(const std::vector<double>& a, const std::vector<double>& b,
                                       int exact_max_n = kExactMaxN) {
    if (a.empty() || b.empty()) throw ArgumentError("Wilcoxon rank-sum needs two non-empty samples");
    const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size()), N = na + nb;
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<int> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return pooled[x] < pooled[y]; });
    std::vector<double> rank(N);
    for (int i = 0; i < N;) {
        int j = i;
        while (j < N && pooled[idx[j]] == pooled[idx[i]]) ++j;
        for (int q = i; q < j; ++q) rank[idx[q]] = (i + 1 + j) / 2.0;
        i = j;
    }

    WilcoxonResult r;
    r.n = N;
    for (int i = 0; i < na; ++i) r.statistic += rank[i];
    r.expected = na * (N + 1) / 2.0;
    double tie_term = 0;
    for (int t : detail::tie_sizes(pooled)) tie_term += static_cast<double>(t) * t * t - t;
    r.variance = static_cast<double>(na) * nb / 12.0 * ((N + 1) - (N > 1 ? tie_term / (static_cast<double>(N) * (N - 1)) : 0.0));
    const double dev = r.statistic - r.expected;
    if (r.variance <= 1e-12) {
        r.variance = 0.0;
        r.p_normal = 1.0;
        r.p_greater_normal = 1.0;
    } else {
        const double sd = std::sqrt(r.variance);
        r.p_normal = std::min(1.0, 2.0 * normal_upper((std::abs(dev) - 0.5) / sd));
        r.p_greater_normal = normal_upper((dev - 0.5) / sd);
    }

    if (N <= exact_max_n) {
        if (N > 60) throw SizeError("exact Wilcoxon enumeration limited to 60 observations");
        // Null distribution of the doubled rank sum over all C(N, na) labelings.
        std::vector<int> twice_rank(N);
        int max_sum = 0;
        for (int i = 0; i < N; ++i) max_sum += twice_rank[i] = static_cast<int>(std::lround(2 * rank[i]));
        std::vector<std::vector<std::uint64_t>> ways(na + 1, std::vector<std::uint64_t>(max_sum + 1, 0));
        ways[0][0] = 1;
        for (int i = 0; i < N; ++i)
            for (int c = std::min(i + 1, na); c >= 1; --c)
                for (int s = max_sum; s >= twice_rank[i]; --s) ways[c][s] += ways[c - 1][s - twice_rank[i]];
        const auto obs = std::lround(2 * r.statistic);
        const auto centre2 = std::lround(2 * 2 * r.expected);  // 4E is an integer
        const auto obs_dev = std::abs(2 * obs - centre2);
        std::uint64_t total = 0, two = 0, greater = 0;
        for (int s = 0; s <= max_sum; ++s) {
            const auto w = ways[na][s];
            total += w;
            if (std::abs(2L * s - centre2) >= obs_dev) two += w;
            if (s >= obs) greater += w;
        }
        r.p_exact = static_cast<double>(two) / static_cast<double>(total);
        r.p_greater_exact = static_cast<double>(greater) / static_cast<double>(total);
    }
    return r;
}

}  // namespace rankdep::analysis
