#pragma once
// Seeded Monte Carlo over markets and strategy profiles.
//
// Replication r draws from Philox stream (seed, r): first the lower-good
// ranking(s) for structured agents, then the tie-break order. Sums are kept in
// exact integer cents, so results do not depend on the worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "rankdep/core.hpp"
#include "rankdep/mechanisms.hpp"
#include "rankdep/prng.hpp"

namespace rankdep {

struct FixedReport {
    RankList report;
};

/// Rank x1 (good 0) or x2 (good 1) first, remaining goods per the mechanism's structure.
struct Structured {
    bool x1_first = true;
};

using Strategy = std::variant<FixedReport, Structured>;

enum class LowerGoodsDraw {
    Common,       ///< one uniformly drawn ranking of goods 2..n-1 shared by all structured agents
    Independent,  ///< each structured agent draws its own
};

struct StrategyProfile {
    std::vector<Strategy> strategies;
    LowerGoodsDraw lower = LowerGoodsDraw::Common;

    static StrategyProfile fixed(std::span<const RankList> reports) {
        StrategyProfile p;
        for (const auto& r : reports) p.strategies.emplace_back(FixedReport{r});
        return p;
    }
    /// First n1 agents rank x1 first, the rest x2 first.
    static StrategyProfile structured(int n, int n1, LowerGoodsDraw lower = LowerGoodsDraw::Common) {
        StrategyProfile p;
        p.lower = lower;
        for (int i = 0; i < n; ++i) p.strategies.emplace_back(Structured{i < n1});
        return p;
    }
    bool any_structured() const {
        return std::any_of(strategies.begin(), strategies.end(),
                           [](const Strategy& s) { return std::holds_alternative<Structured>(s); });
    }
};

inline std::string strategy_label(const Strategy& s) {
    if (const auto* st = std::get_if<Structured>(&s)) return st->x1_first ? "x1_first" : "x2_first";
    return "fixed";
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

struct StrategyEstimate {
    std::string label;
    int agents = 0;
    MeanSe eu;  ///< dollars
};

struct SimReport {
    std::int64_t replications = 0;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> rank_histogram;  ///< index j-1 counts receipts at rank j
    MeanSe welfare;                            ///< total, dollars
    MeanSe rho_welfare;                        ///< rho component, dollars
    std::vector<StrategyEstimate> per_strategy;
    std::vector<double> per_agent_eu;          ///< dollars

    std::vector<double> rank_fractions() const {
        std::vector<double> f(rank_histogram.size());
        const double total = static_cast<double>(replications) * static_cast<double>(rank_histogram.size());
        for (std::size_t j = 0; j < f.size(); ++j) f[j] = static_cast<double>(rank_histogram[j]) / total;
        return f;
    }
};

/// One assignment inside one replication.
struct ReplicationRecord {
    std::int64_t rep;
    AgentId agent;
    GoodId good;
    int rank;
    Cents utility;
};

/// True when every row equals the first and v(0) > v(1) > v(2) = ... = v(n-1).
inline bool is_symmetric_market(const MarketInstance& m) {
    if (m.n < 3) return false;
    const auto& rows = m.values.rows();
    for (const auto& r : rows)
        if (r != rows.front()) return false;
    const auto& v = rows.front();
    if (!(v[0] > v[1] && v[1] > v[2])) return false;
    return std::all_of(v.begin() + 2, v.end(), [&](Cents c) { return c == v[2]; });
}

namespace detail {

struct SimAccum {
    std::vector<std::int64_t> hist;
    __int128 welfare_sum = 0, welfare_sq = 0;
    __int128 rho_sum = 0, rho_sq = 0;
    std::vector<__int128> group_sum, group_sq;
    std::vector<std::int64_t> agent_sum;

    SimAccum(int n, int groups) : hist(n, 0), group_sum(groups, 0), group_sq(groups, 0), agent_sum(n, 0) {}

    void merge(const SimAccum& o) {
        for (std::size_t j = 0; j < hist.size(); ++j) hist[j] += o.hist[j];
        welfare_sum += o.welfare_sum;
        welfare_sq += o.welfare_sq;
        rho_sum += o.rho_sum;
        rho_sq += o.rho_sq;
        for (std::size_t g = 0; g < group_sum.size(); ++g) {
            group_sum[g] += o.group_sum[g];
            group_sq[g] += o.group_sq[g];
        }
        for (std::size_t i = 0; i < agent_sum.size(); ++i) agent_sum[i] += o.agent_sum[i];
    }
};

inline MeanSe mean_se_cents(__int128 sum, __int128 sq, std::int64_t reps, double scale = 1.0) {
    const double r = static_cast<double>(reps);
    // Centre before converting to double to avoid cancellation in sq - sum^2/r.
    const double mean = static_cast<double>(sum) / r;
    const __int128 centered = sq * reps - sum * sum;  // r^2 * population variance
    double var = reps > 1 ? static_cast<double>(centered) / (r * (r - 1.0)) : 0.0;
    if (var < 0) var = 0;
    return {mean / 100.0 / scale, std::sqrt(var / r) / 100.0 / scale};
}

}  // namespace detail

/// Runs `replications` independent plays. `on_record`, when set, receives every
/// assignment in replication order (forces a single worker for ordering).
inline SimReport simulate(MechanismKind kind, const MarketInstance& market, const StrategyProfile& profile,
                          std::int64_t replications, std::uint64_t seed, int threads = 1,
                          const std::function<void(const ReplicationRecord&)>& on_record = {}) {
    const int n = market.n;
    if (replications < 1) throw ArgumentError("replications must be >= 1");
    if (static_cast<int>(profile.strategies.size()) != n)
        throw ArgumentError("profile size does not match market");
    if (profile.any_structured() && !is_symmetric_market(market))
        throw ArgumentError("structured strategies need a symmetric market (common values v1 > v2 > rest equal)");
    for (const auto& s : profile.strategies)
        if (const auto* f = std::get_if<FixedReport>(&s); f && f->report.size() != n)
            throw ArgumentError("fixed report has the wrong length");

    // Strategy groups in first-appearance order of their labels.
    std::vector<std::string> labels;
    std::vector<int> group_of(n);
    for (int i = 0; i < n; ++i) {
        const auto lbl = strategy_label(profile.strategies[i]);
        auto it = std::find(labels.begin(), labels.end(), lbl);
        if (it == labels.end()) {
            labels.push_back(lbl);
            it = labels.end() - 1;
        }
        group_of[i] = static_cast<int>(it - labels.begin());
    }
    const int groups = static_cast<int>(labels.size());
    std::vector<int> group_size(groups, 0);
    for (int g : group_of) ++group_size[g];

    bool all_x1 = true;
    for (const auto& s : profile.strategies) {
        const auto* st = std::get_if<Structured>(&s);
        if (!st || !st->x1_first) all_x1 = false;
    }
    const bool corner_convention = kind == MechanismKind::BOSTON && all_x1;

    auto run_range = [&](std::int64_t begin, std::int64_t end, detail::SimAccum& acc) {
        std::vector<RankList> reports(n);
        std::vector<GoodId> lower(std::max(0, n - 2));
        std::vector<GoodId> order_buf;
        std::vector<char> taken;
        std::vector<GoodId> out;
        std::vector<std::int64_t> gsum(groups);
        for (std::int64_t rep = begin; rep < end; ++rep) {
            PhiloxStream rng{seed, static_cast<std::uint64_t>(rep)};
            bool drew_common = false;
            for (int i = 0; i < n; ++i) {
                const auto& s = profile.strategies[i];
                if (const auto* f = std::get_if<FixedReport>(&s)) {
                    reports[i] = f->report;
                    continue;
                }
                const auto& st = std::get<Structured>(s);
                if (profile.lower == LowerGoodsDraw::Independent || !drew_common) {
                    std::iota(lower.begin(), lower.end(), 2);
                    rng.shuffle(std::span<GoodId>{lower});
                    drew_common = true;
                }
                const GoodId first = st.x1_first ? 0 : 1;
                std::vector<GoodId> o{first};
                if (kind == MechanismKind::RSD || corner_convention) {
                    o.push_back(1 - first);
                    o.insert(o.end(), lower.begin(), lower.end());
                } else {
                    o.insert(o.end(), lower.begin(), lower.end());
                    o.push_back(1 - first);
                }
                reports[i] = RankList{std::move(o)};
            }
            order_buf.resize(n);
            std::iota(order_buf.begin(), order_buf.end(), 0);
            rng.shuffle(std::span<GoodId>{order_buf});
            if (kind == MechanismKind::RSD)
                detail::rsd_into(reports, order_buf, taken, out);
            else
                detail::boston_into(reports, order_buf, taken, out);

            std::int64_t welfare = 0, rho_part = 0;
            std::fill(gsum.begin(), gsum.end(), 0);
            for (int i = 0; i < n; ++i) {
                const int rank = reports[i].rank(out[i]);
                const Cents r = market.rho(rank);
                const Cents u = market.values(i, out[i]) + r;
                ++acc.hist[rank - 1];
                welfare += u.value();
                rho_part += r.value();
                gsum[group_of[i]] += u.value();
                acc.agent_sum[i] += u.value();
                if (on_record) on_record({rep, i, out[i], rank, u});
            }
            acc.welfare_sum += welfare;
            acc.welfare_sq += static_cast<__int128>(welfare) * welfare;
            acc.rho_sum += rho_part;
            acc.rho_sq += static_cast<__int128>(rho_part) * rho_part;
            for (int g = 0; g < groups; ++g) {
                acc.group_sum[g] += gsum[g];
                acc.group_sq[g] += static_cast<__int128>(gsum[g]) * gsum[g];
            }
        }
    };

    detail::SimAccum total(n, groups);
    const int workers = on_record ? 1 : static_cast<int>(std::clamp<std::int64_t>(threads, 1, replications));
    if (workers == 1) {
        run_range(0, replications, total);
    } else {
        std::vector<detail::SimAccum> parts(workers, detail::SimAccum(n, groups));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t b = replications * w / workers, e = replications * (w + 1) / workers;
            pool.emplace_back([&, w, b, e] { run_range(b, e, parts[w]); });
        }
        for (auto& t : pool) t.join();
        for (const auto& p : parts) total.merge(p);
    }

    SimReport rep;
    rep.replications = replications;
    rep.seed = seed;
    rep.rank_histogram = total.hist;
    rep.welfare = detail::mean_se_cents(total.welfare_sum, total.welfare_sq, replications);
    rep.rho_welfare = detail::mean_se_cents(total.rho_sum, total.rho_sq, replications);
    for (int g = 0; g < groups; ++g)
        rep.per_strategy.push_back({labels[g], group_size[g],
                                    detail::mean_se_cents(total.group_sum[g], total.group_sq[g], replications,
                                                          group_size[g])});
    for (int i = 0; i < n; ++i)
        rep.per_agent_eu.push_back(static_cast<double>(total.agent_sum[i]) / static_cast<double>(replications) / 100.0);
    return rep;
}

/// Fraction of agents receiving their j-th ranked good, j = 1..n.
inline std::vector<double> rank_distribution(MechanismKind kind, const MarketInstance& market,
                                             const StrategyProfile& profile, std::int64_t replications,
                                             std::uint64_t seed, int threads = 1) {
    return simulate(kind, market, profile, replications, seed, threads).rank_fractions();
}

}  // namespace rankdep
