#pragma once
// Symmetric environment: common values v1 > v2 > vbar = v3 = ... = vn.
//
// Agents choose which of x1 (good 0) and x2 (good 1) to rank first.
//   RSD    x1-first: (x1, x2, lower...)    x2-first: (x2, x1, lower...)
//   Boston x1-first: (x1, lower..., x2)    x2-first: (x2, lower..., x1)
//   Boston with every agent ranking x1 first: (x1, x2, lower...)
// "lower..." is one uniformly drawn ranking of goods 2..n-1 shared by all
// agents. Under that convention the continuation after x1/x2 are gone is a
// uniform lottery over ranks, which is what delta and delta' price.

#include <algorithm>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include "rankdep/core.hpp"
#include "rankdep/mechanisms.hpp"

namespace rankdep {

struct SymmetricInstance {
    int n = 0;
    Cents v1, v2, vbar;
    RhoSchedule rho;

    SymmetricInstance() = default;
    SymmetricInstance(int n_, Cents v1_, Cents v2_, Cents vbar_, RhoSchedule rho_)
        : n{n_}, v1{v1_}, v2{v2_}, vbar{vbar_}, rho{std::move(rho_)} {
        if (n < 2) throw ArgumentError("symmetric instance needs n >= 2");
        if (!(v1 > v2 && v2 > vbar && vbar >= Cents{0}))
            throw ArgumentError("symmetric instance requires v1 > v2 > vbar >= 0");
        if (rho.size() != n) throw ArgumentError("rho schedule length must equal n");
    }

    Cents value_of(GoodId g) const { return g == 0 ? v1 : g == 1 ? v2 : vbar; }

    MarketInstance market() const {
        std::vector<Cents> row(n, vbar);
        row[0] = v1;
        row[1] = v2;
        std::vector<Good> goods;
        for (int g = 0; g < n; ++g) goods.push_back({g, "x" + std::to_string(g + 1)});
        return MarketInstance{std::move(goods), ValueMatrix::common(row), rho};
    }

    /// Sum of rho(j) for j in [from, to], 1-based inclusive; empty range is 0.
    Cents rho_sum(int from, int to) const {
        Cents s;
        for (int j = from; j <= to; ++j) s += rho(j);
        return s;
    }
};

struct SymmetricParams {
    Rational delta;        ///< vbar + (rho(2)+...+rho(n-1))/(n-2), cents
    Rational delta_prime;  ///< vbar + rho_bar, cents
    Rational rho_bar;      ///< (rho(3)+...+rho(n))/(n-2), cents
    std::optional<Rational> alpha;  ///< empty when rho(1) == rho(2)
};

inline SymmetricParams symmetric_params(const SymmetricInstance& inst) {
    if (inst.n < 3) throw ArgumentError("symmetric parameters need n >= 3 (division by n-2)");
    const int n = inst.n;
    SymmetricParams p;
    p.delta = Rational::of(inst.vbar) + Rational{inst.rho_sum(2, n - 1).value(), n - 2};
    p.rho_bar = Rational{inst.rho_sum(3, n).value(), n - 2};
    p.delta_prime = Rational::of(inst.vbar) + p.rho_bar;
    const Cents gap = inst.rho(1) - inst.rho(2);
    if (gap > Cents{0})
        p.alpha = Rational{n, 2} + Rational{(n - 1) * (inst.v1 - inst.v2).value(), 2 * gap.value()};
    return p;
}

/// Expected utilities (cents) for an agent ranking x1 first and one ranking x2 first.
/// A side is empty when no agent can hold that strategy at the queried n1.
struct GroupEu {
    std::optional<Rational> x1_first;
    std::optional<Rational> x2_first;
};

namespace detail {

inline Rational top_value(const SymmetricInstance& inst, Cents v, int rank) {
    return Rational::of(v + inst.rho(rank));
}

/// U^B(x1, m) as a formula in m, m >= 1.
inline Rational boston_x1_formula(const SymmetricInstance& inst, const SymmetricParams& p, int m) {
    return top_value(inst, inst.v1, 1) / m + p.delta * Rational{m - 1, m};
}
/// U^B(x2, m), m <= n-1.
inline Rational boston_x2_formula(const SymmetricInstance& inst, const SymmetricParams& p, int m) {
    const int k = inst.n - m;
    return top_value(inst, inst.v2, 1) / k + p.delta * Rational{k - 1, k};
}

inline Rational corner_value(const SymmetricInstance& inst, const SymmetricParams& p) {
    const int n = inst.n;
    return (top_value(inst, inst.v1, 1) + top_value(inst, inst.v2, 2)) / n + p.delta_prime * Rational{n - 2, n};
}

inline Rational sd_x1_formula(const SymmetricInstance& inst, const SymmetricParams& p, int m) {
    const int n = inst.n;
    const Rational second = top_value(inst, inst.v2, 2) * Rational{m - 1, n - 1} +
                            top_value(inst, inst.v1, 1) * Rational{n - m, n - 1};
    return top_value(inst, inst.v1, 1) / n + second / n + p.delta_prime * Rational{n - 2, n};
}

inline Rational sd_x2_formula(const SymmetricInstance& inst, const SymmetricParams& p, int m) {
    const int n = inst.n;
    const Rational second = top_value(inst, inst.v2, 1) * Rational{m, n - 1} +
                            Rational::of(inst.v1 + inst.rho(2)) * Rational{n - m - 1, n - 1};
    return top_value(inst, inst.v2, 1) / n + second / n + p.delta_prime * Rational{n - 2, n};
}

inline Rational floor_of(const Rational& r) {
    std::int64_t q = r.num() / r.den();
    if (r.num() % r.den() != 0 && r.num() < 0) --q;
    return Rational{q};
}

}  // namespace detail

/// U^B(x1, n1), U^B(x2, n1) for 1 <= n1 <= n-1.
inline GroupEu boston_group_eu(const SymmetricInstance& inst, int n1) {
    if (n1 < 1 || n1 > inst.n - 1) throw ArgumentError("Boston group EU needs 1 <= n1 <= n-1");
    const auto p = symmetric_params(inst);
    return {detail::boston_x1_formula(inst, p, n1), detail::boston_x2_formula(inst, p, n1)};
}

/// U^SD(x1, n1) (n1 >= 1) and U^SD(x2, n1) (n1 <= n-1) for 0 <= n1 <= n.
inline GroupEu sd_group_eu(const SymmetricInstance& inst, int n1) {
    if (n1 < 0 || n1 > inst.n) throw ArgumentError("SD group EU needs 0 <= n1 <= n");
    const auto p = symmetric_params(inst);
    GroupEu eu;
    if (n1 >= 1) eu.x1_first = detail::sd_x1_formula(inst, p, n1);
    if (n1 <= inst.n - 1) eu.x2_first = detail::sd_x2_formula(inst, p, n1);
    return eu;
}

struct EquilibriumSolution {
    MechanismKind mechanism = MechanismKind::RSD;
    std::vector<int> n1_candidates;  ///< ascending; front() is canonical
    Rational range_lo, range_hi;     ///< unclamped interval from the interior conditions
    bool has_range = true;           ///< false for SD when rho(1) == rho(2)
    bool corner_all_top = false;
    bool clamped = false;            ///< interval missed [1, n-1]; nearest boundary taken
    std::vector<GroupEu> eu_at_candidates;

    int canonical() const { return n1_candidates.front(); }
};

inline EquilibriumSolution solve_equilibrium(MechanismKind kind, const SymmetricInstance& inst) {
    const auto p = symmetric_params(inst);
    const int n = inst.n;
    EquilibriumSolution sol;
    sol.mechanism = kind;

    auto integers_in = [](const Rational& lo, const Rational& hi, int min, int max) {
        std::vector<int> out;
        Rational k = detail::floor_of(lo);
        if (k < lo) k += 1;
        for (; k <= hi; k += 1)
            if (k.num() >= min && k.num() <= max) out.push_back(static_cast<int>(k.num()));
        return out;
    };

    if (kind == MechanismKind::BOSTON) {
        const Rational a = Rational::of(inst.v1 + inst.rho(1)) - p.delta;
        const Rational b = Rational::of(inst.v2 + inst.rho(1)) - p.delta;
        const Rational denom = a + b;
        if (denom <= Rational{0}) throw InconsistencyError("Boston interval denominator is not positive");
        sol.range_lo = (a * n - b) / denom;
        sol.range_hi = (a * n + a) / denom;
        const bool corner = detail::corner_value(inst, p) >= Rational::of(inst.v2 + inst.rho(1));
        if (corner) {
            sol.corner_all_top = true;
            sol.n1_candidates = {n};
        } else {
            sol.n1_candidates = integers_in(sol.range_lo, sol.range_hi, 1, n - 1);
            if (sol.n1_candidates.empty()) {
                sol.clamped = true;
                sol.n1_candidates = {sol.range_lo > Rational{n - 1} ? n - 1 : 1};
            }
        }
        for (int m : sol.n1_candidates) {
            if (m == n)
                sol.eu_at_candidates.push_back({detail::corner_value(inst, p), std::nullopt});
            else
                sol.eu_at_candidates.push_back(boston_group_eu(inst, m));
        }
    } else {
        if (p.alpha) {
            sol.range_lo = *p.alpha - Rational{1, 2};
            sol.range_hi = *p.alpha + Rational{1, 2};
            // Everyone ranking x1 first only needs the x1 -> x2 condition.
            for (int m = 1; m <= n; ++m)
                if (Rational{m} <= sol.range_hi && (m == n || Rational{m} >= sol.range_lo))
                    sol.n1_candidates.push_back(m);
        } else {
            // rho(1) == rho(2): switching x1 and x2 only trades v1 for v2, so all rank x1 first.
            sol.has_range = false;
            sol.n1_candidates = {n};
        }
        if (sol.n1_candidates.empty()) throw InconsistencyError("SD closed form produced no equilibrium");
        sol.corner_all_top = sol.n1_candidates.back() == n;
        for (int m : sol.n1_candidates) sol.eu_at_candidates.push_back(sd_group_eu(inst, m));
    }
    if (sol.n1_candidates.empty()) throw InconsistencyError("no equilibrium candidate found");
    return sol;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle over the structured strategy space.

inline constexpr int kMaxBruteForceAgents = 6;

enum class StructuredTop { X1, X2 };

/// Report template for an agent of the given top choice, with `lower` the
/// shared ranking of goods 2..n-1.
inline RankList structured_report(MechanismKind kind, StructuredTop top, bool corner_convention,
                                  std::span<const GoodId> lower) {
    const GoodId first = top == StructuredTop::X1 ? 0 : 1;
    const GoodId other = 1 - first;
    std::vector<GoodId> order{first};
    if (kind == MechanismKind::RSD || corner_convention) {
        order.push_back(other);
        order.insert(order.end(), lower.begin(), lower.end());
    } else {
        order.insert(order.end(), lower.begin(), lower.end());
        order.push_back(other);
    }
    return RankList{std::move(order)};
}

/// Exact mean utility (cents) of the x1-first and x2-first groups when
/// `m` agents rank x1 first, averaged over all tie-break orders and all
/// shared lower-good rankings. `corner_convention` selects the all-top
/// Boston template for the x1-first group.
inline GroupEu structured_group_eu(MechanismKind kind, const SymmetricInstance& inst, int m,
                                   bool corner_convention = false) {
    const int n = inst.n;
    if (n > kMaxBruteForceAgents) throw SizeError("brute force limited to n <= " + std::to_string(kMaxBruteForceAgents));
    if (m < 0 || m > n) throw ArgumentError("group size out of range");
    const MarketInstance market = inst.market();

    std::vector<GoodId> lower(n - 2);
    std::iota(lower.begin(), lower.end(), 2);
    std::int64_t sum_x1 = 0, sum_x2 = 0, draws = 0;
    std::vector<RankList> reports(n);
    std::vector<AgentId> order(n);
    std::vector<char> taken;
    std::vector<GoodId> out;
    do {
        for (int i = 0; i < n; ++i)
            reports[i] = structured_report(kind, i < m ? StructuredTop::X1 : StructuredTop::X2,
                                           i < m && corner_convention, lower);
        std::iota(order.begin(), order.end(), 0);
        do {
            if (kind == MechanismKind::RSD)
                detail::rsd_into(reports, order, taken, out);
            else
                detail::boston_into(reports, order, taken, out);
            for (int i = 0; i < n; ++i) {
                const auto u = (market.values(i, out[i]) + market.rho(reports[i].rank(out[i]))).value();
                (i < m ? sum_x1 : sum_x2) += u;
            }
            ++draws;
        } while (std::next_permutation(order.begin(), order.end()));
    } while (std::next_permutation(lower.begin(), lower.end()));

    GroupEu eu;
    if (m > 0) eu.x1_first = Rational{sum_x1, draws * m};
    if (m < n) eu.x2_first = Rational{sum_x2, draws * (n - m)};
    return eu;
}

/// Deviation gains at n1 (empty when that group is empty).
struct DeviationGains {
    std::optional<Rational> x1_to_x2;
    std::optional<Rational> x2_to_x1;
};

namespace detail {

/// Structured-profile utilities for m = 0..n. Entry n uses the all-top
/// convention for Boston; `all_x1_plain` is the Boston profile in which all n
/// rank x1 first but keep x2 last (a lone x2-ranker switching at n1 = n-1).
struct StructuredTable {
    std::vector<GroupEu> eu;
    std::optional<Rational> all_x1_plain;
};

inline StructuredTable structured_table(MechanismKind kind, const SymmetricInstance& inst, int threads) {
    const int n = inst.n;
    StructuredTable t;
    t.eu.resize(n + 1);
    auto job = [&](int m) {
        if (m <= n) {
            t.eu[m] = structured_group_eu(kind, inst, m, kind == MechanismKind::BOSTON && m == n);
        } else {
            t.all_x1_plain = structured_group_eu(kind, inst, n, false).x1_first;
        }
    };
    const int jobs = kind == MechanismKind::BOSTON ? n + 2 : n + 1;
    const int workers = std::clamp(threads, 1, jobs);
    if (workers == 1) {
        for (int m = 0; m < jobs; ++m) job(m);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (int m = w; m < jobs; m += workers) job(m);
            });
        for (auto& th : pool) th.join();
    }
    return t;
}

inline DeviationGains gains_from_table(MechanismKind kind, const StructuredTable& t, int n, int m) {
    DeviationGains g;
    if (m >= 1) g.x1_to_x2 = *t.eu[m].x1_first - *t.eu[m - 1].x2_first;
    if (m <= n - 1) {
        const Rational deviant = (kind == MechanismKind::BOSTON && m + 1 == n) ? *t.all_x1_plain
                                                                              : *t.eu[m + 1].x1_first;
        g.x2_to_x1 = *t.eu[m].x2_first - deviant;
    }
    return g;
}

}  // namespace detail

/// Delta_{x1->x2}(n1) and Delta_{x2->x1}(n1), exact by enumeration.
inline DeviationGains brute_force_gains(MechanismKind kind, const SymmetricInstance& inst, int n1) {
    if (n1 < 0 || n1 > inst.n) throw ArgumentError("n1 out of range");
    const auto t = detail::structured_table(kind, inst, 1);
    return detail::gains_from_table(kind, t, inst.n, n1);
}

/// Every n1 in 0..n at which neither group gains by switching its top choice.
inline std::vector<int> brute_force_equilibria(MechanismKind kind, const SymmetricInstance& inst, int threads = 1) {
    if (inst.n > kMaxBruteForceAgents)
        throw SizeError("brute force limited to n <= " + std::to_string(kMaxBruteForceAgents));
    if (inst.n < 3) throw ArgumentError("brute force needs n >= 3");
    const auto t = detail::structured_table(kind, inst, threads);
    std::vector<int> out;
    for (int m = 0; m <= inst.n; ++m) {
        const auto g = detail::gains_from_table(kind, t, inst.n, m);
        if ((!g.x1_to_x2 || *g.x1_to_x2 >= Rational{0}) && (!g.x2_to_x1 || *g.x2_to_x1 >= Rational{0}))
            out.push_back(m);
    }
    return out;
}

inline constexpr int kMaxTruthCheckAgents = 6;

/// True iff no single agent can raise its exact expected utility by
/// deviating from the all-truthful profile (x1, x2, ..., xn) to any report.
inline bool check_truthtelling_equilibrium(MechanismKind kind, const SymmetricInstance& inst, int threads = 1) {
    const int n = inst.n;
    if (n > kMaxTruthCheckAgents)
        throw SizeError("truth-telling check limited to n <= " + std::to_string(kMaxTruthCheckAgents));
    const MarketInstance market = inst.market();
    std::vector<RankList> reports(n, RankList::identity(n));
    const Rational truthful = exact_expected_utilities(kind, reports, market, threads)[0];
    // Agents are symmetric, so agent 0 stands in for every deviator.
    std::vector<GoodId> dev(n);
    std::iota(dev.begin(), dev.end(), 0);
    while (std::next_permutation(dev.begin(), dev.end())) {
        reports[0] = RankList{dev};
        if (exact_expected_utilities(kind, reports, market, threads)[0] > truthful) return false;
    }
    return true;
}

struct EquilibriumWelfare {
    Rational rho_component;  ///< expected sum of rho terms, cents
    Rational total;          ///< rho component plus v1 + v2 + (n-2) vbar
};

inline EquilibriumWelfare equilibrium_welfare(MechanismKind kind, const SymmetricInstance& inst, int n1) {
    const int n = inst.n;
    const Rational r1 = Rational::of(inst.rho(1));
    const Rational r2 = Rational::of(inst.rho(2));
    EquilibriumWelfare w;
    if (kind == MechanismKind::BOSTON) {
        if (n1 < 1 || n1 > n) throw ArgumentError("Boston welfare needs 1 <= n1 <= n");
        w.rho_component = n1 == n ? Rational::of(inst.rho_sum(1, n)) : r1 * 2 + Rational::of(inst.rho_sum(2, n - 1));
    } else {
        if (n1 < 0 || n1 > n) throw ArgumentError("SD welfare needs 0 <= n1 <= n");
        const Rational same_x1 = Rational{n1, n} * Rational{n1 - 1, n - 1};
        const Rational mixed = Rational{n1, n} * Rational{n - n1, n - 1};
        const Rational same_x2 = Rational{n - n1, n} * Rational{n - n1 - 1, n - 1};
        w.rho_component = same_x1 * (r1 + r2) + mixed * 2 * (r1 + r1) + same_x2 * (r1 + r2) +
                          Rational::of(inst.rho_sum(3, n));
    }
    w.total = w.rho_component + Rational::of(inst.v1 + inst.v2 + inst.vbar * (n - 2));
    return w;
}

}  // namespace rankdep
