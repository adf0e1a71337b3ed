#pragma once
// Random serial dictatorship and Boston (immediate acceptance) engines.
//
// A single TieBreakOrder drives both: for RSD it is the picking order, for
// Boston position p carries tie-break number p + 1 (lower number wins).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rankdep/core.hpp"
#include "rankdep/prng.hpp"

namespace rankdep {

enum class MechanismKind { RSD, BOSTON };

inline std::string_view to_string(MechanismKind k) { return k == MechanismKind::RSD ? "rsd" : "boston"; }

inline MechanismKind parse_mechanism(std::string_view s) {
    if (s == "rsd" || s == "RSD" || s == "sd" || s == "SD") return MechanismKind::RSD;
    if (s == "boston" || s == "BOSTON" || s == "Boston") return MechanismKind::BOSTON;
    throw ArgumentError("unknown mechanism '" + std::string(s) + "' (expected rsd or boston)");
}

/// order[p] = agent at priority position p (0 = first pick / best tie-break).
class TieBreakOrder {
public:
    TieBreakOrder() = default;
    explicit TieBreakOrder(std::vector<AgentId> order) : order_{std::move(order)} {
        if (!is_permutation_of_n(order_)) throw ArgumentError("tie-break order is not a permutation");
    }
    static TieBreakOrder identity(int n) {
        std::vector<AgentId> o(n);
        std::iota(o.begin(), o.end(), 0);
        return TieBreakOrder{std::move(o)};
    }
    /// Uniform draw from stream (seed, stream).
    static TieBreakOrder draw(int n, std::uint64_t seed, std::uint64_t stream = 0) {
        PhiloxStream rng{seed, stream};
        return draw(n, rng);
    }
    static TieBreakOrder draw(int n, PhiloxStream& rng) {
        std::vector<AgentId> o(n);
        std::iota(o.begin(), o.end(), 0);
        rng.shuffle(std::span<AgentId>{o});
        return TieBreakOrder{std::move(o)};
    }

    int size() const { return static_cast<int>(order_.size()); }
    AgentId operator[](int position) const { return order_[position]; }
    const std::vector<AgentId>& order() const { return order_; }
    bool operator==(const TieBreakOrder&) const = default;

private:
    std::vector<AgentId> order_;
};

namespace detail {

inline void check_profile(std::span<const RankList> reports, const TieBreakOrder& order) {
    const auto n = static_cast<int>(reports.size());
    if (order.size() != n) throw ArgumentError("tie-break order size does not match report count");
    for (const auto& r : reports)
        if (r.size() != n) throw ArgumentError("every report must rank all n goods");
}

/// RSD without validation; `out` receives good per agent.
inline void rsd_into(std::span<const RankList> reports, std::span<const AgentId> order,
                     std::vector<char>& taken, std::vector<GoodId>& out) {
    const auto n = reports.size();
    taken.assign(n, 0);
    out.assign(n, -1);
    for (AgentId agent : order) {
        for (GoodId g : reports[agent].order()) {
            if (!taken[g]) {
                taken[g] = 1;
                out[agent] = g;
                break;
            }
        }
    }
}

inline void boston_into(std::span<const RankList> reports, std::span<const AgentId> order,
                        std::vector<char>& taken, std::vector<GoodId>& out) {
    const auto n = reports.size();
    taken.assign(n, 0);
    out.assign(n, -1);
    std::size_t assigned = 0;
    for (std::size_t round = 0; round < n && assigned < n; ++round) {
        // Claims this round are processed in priority order, so the first
        // claimant of a free good is the highest-priority one.
        for (AgentId agent : order) {
            if (out[agent] != -1) continue;
            const GoodId g = reports[agent].order()[round];
            if (!taken[g]) {
                taken[g] = 1;
                out[agent] = g;
                ++assigned;
            }
        }
    }
}

}  // namespace detail

inline Matching run_rsd(std::span<const RankList> reports, const TieBreakOrder& order) {
    detail::check_profile(reports, order);
    std::vector<char> taken;
    std::vector<GoodId> out;
    detail::rsd_into(reports, order.order(), taken, out);
    return Matching{std::move(out)};
}

/// Rounds k = 1..n; an agent whose k-th choice is already gone simply waits.
inline Matching run_boston(std::span<const RankList> reports, const TieBreakOrder& order) {
    detail::check_profile(reports, order);
    std::vector<char> taken;
    std::vector<GoodId> out;
    detail::boston_into(reports, order.order(), taken, out);
    return Matching{std::move(out)};
}

inline Matching run_mechanism(MechanismKind kind, std::span<const RankList> reports, const TieBreakOrder& order) {
    return kind == MechanismKind::RSD ? run_rsd(reports, order) : run_boston(reports, order);
}

struct RandomRun {
    Outcome outcome;
    TieBreakOrder order;
};

/// Draws the order from Philox stream (seed, 0) and annotates the outcome.
inline RandomRun run_random(MechanismKind kind, std::span<const RankList> reports, const MarketInstance& market,
                            std::uint64_t seed) {
    auto order = TieBreakOrder::draw(static_cast<int>(reports.size()), seed, 0);
    const Matching m = run_mechanism(kind, reports, order);
    return {make_outcome(m, reports, market), std::move(order)};
}

inline constexpr int kMaxExactAgents = 8;

/// Per-agent expected utility in cents, averaged exactly over all n! orders.
/// Orders are split into n blocks by the first agent; blocks may run on
/// separate threads and are summed in block order.
inline std::vector<Rational> exact_expected_utilities(MechanismKind kind, std::span<const RankList> reports,
                                                      const MarketInstance& market, int threads = 1) {
    const int n = static_cast<int>(reports.size());
    if (n > kMaxExactAgents)
        throw SizeError("exact enumeration limited to n <= " + std::to_string(kMaxExactAgents) +
                        " (n! orders); use simulation for larger markets");
    if (n != market.n) throw ArgumentError("report count does not match market size");
    detail::check_profile(reports, TieBreakOrder::identity(n));

    std::vector<std::vector<std::int64_t>> block_sums(n, std::vector<std::int64_t>(n, 0));
    auto run_block = [&](int first) {
        std::vector<AgentId> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::swap(order[0], order[first]);
        std::sort(order.begin() + 1, order.end());
        std::vector<char> taken;
        std::vector<GoodId> out;
        auto& sums = block_sums[first];
        do {
            if (kind == MechanismKind::RSD)
                detail::rsd_into(reports, order, taken, out);
            else
                detail::boston_into(reports, order, taken, out);
            for (AgentId i = 0; i < n; ++i)
                sums[i] += (market.values(i, out[i]) + market.rho(reports[i].rank(out[i]))).value();
        } while (std::next_permutation(order.begin() + 1, order.end()));
    };

    const int workers = std::clamp(threads, 1, std::max(1, n));
    if (workers == 1) {
        for (int b = 0; b < n; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int b = w; b < n; b += workers) run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    std::int64_t orders = 1;
    for (int k = 2; k <= n; ++k) orders *= k;
    std::vector<Rational> eu(n);
    for (AgentId i = 0; i < n; ++i) {
        std::int64_t total = 0;
        for (int b = 0; b < n; ++b) total += block_sums[b][i];
        eu[i] = Rational{total, orders};
    }
    return eu;
}

inline constexpr int kMaxParetoAgents = 7;

/// True iff no matching weakly improves every agent (by submitted rank) and strictly improves one.
inline bool is_pareto_efficient(const Matching& matching, std::span<const RankList> reports) {
    const int n = matching.size();
    if (n > kMaxParetoAgents)
        throw SizeError("Pareto check enumerates n! matchings; limited to n <= " + std::to_string(kMaxParetoAgents));
    if (static_cast<int>(reports.size()) != n) throw ArgumentError("report count does not match matching");
    std::vector<int> current(n);
    for (AgentId i = 0; i < n; ++i) current[i] = reports[i].rank(matching[i]);

    std::vector<GoodId> alt(n);
    std::iota(alt.begin(), alt.end(), 0);
    do {
        bool weakly = true, strictly = false;
        for (AgentId i = 0; i < n && weakly; ++i) {
            const int r = reports[i].rank(alt[i]);
            if (r > current[i]) weakly = false;
            if (r < current[i]) strictly = true;
        }
        if (weakly && strictly) return false;
    } while (std::next_permutation(alt.begin(), alt.end()));
    return true;
}

}  // namespace rankdep
