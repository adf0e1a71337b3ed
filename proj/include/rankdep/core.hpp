#pragma once
// Market primitives and the rankings-dependent utility u = v(x) + rho(rank).

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankdep/errors.hpp"
#include "rankdep/money.hpp"

namespace rankdep {

using AgentId = int;
using GoodId = int;

struct Good {
    GoodId id = 0;
    std::string label;
};

inline bool is_permutation_of_n(std::span<const int> xs) {
    std::vector<char> seen(xs.size(), 0);
    for (int x : xs) {
        if (x < 0 || static_cast<std::size_t>(x) >= xs.size() || seen[x]) return false;
        seen[x] = 1;
    }
    return true;
}

/// One agent's submitted ordinal report, most-preferred first.
class RankList {
public:
    RankList() = default;
    explicit RankList(std::vector<GoodId> order) : order_{std::move(order)} {
        if (!is_permutation_of_n(order_))
            throw ArgumentError("rank list is not a permutation of 0..n-1");
        rank_of_.assign(order_.size(), 0);
        for (std::size_t p = 0; p < order_.size(); ++p) rank_of_[order_[p]] = static_cast<int>(p) + 1;
    }

    /// The identity report 0,1,...,n-1.
    static RankList identity(int n) {
        std::vector<GoodId> o(n);
        for (int i = 0; i < n; ++i) o[i] = i;
        return RankList{std::move(o)};
    }

    int size() const { return static_cast<int>(order_.size()); }
    const std::vector<GoodId>& order() const { return order_; }
    GoodId at_rank(int rank) const { return order_.at(rank - 1); }
    /// 1-based position of good g.
    int rank(GoodId g) const {
        if (g < 0 || g >= size()) throw ArgumentError("good id out of range");
        return rank_of_[g];
    }

    bool operator==(const RankList& o) const { return order_ == o.order_; }

private:
    std::vector<GoodId> order_;
    std::vector<int> rank_of_;
};

/// rho(1) >= rho(2) >= ... >= rho(n), in cents. Entries may be negative.
class RhoSchedule {
public:
    RhoSchedule() = default;
    explicit RhoSchedule(std::vector<Cents> rho) : rho_{std::move(rho)} {
        for (std::size_t j = 1; j < rho_.size(); ++j)
            if (rho_[j] > rho_[j - 1]) throw ArgumentError("rho schedule must be non-increasing");
    }
    static RhoSchedule zero(int n) { return RhoSchedule{std::vector<Cents>(n)}; }

    int size() const { return static_cast<int>(rho_.size()); }
    /// rank is 1-based.
    Cents operator()(int rank) const {
        if (rank < 1 || rank > size()) throw ArgumentError("rank " + std::to_string(rank) + " out of range");
        return rho_[rank - 1];
    }
    const std::vector<Cents>& values() const { return rho_; }
    bool operator==(const RhoSchedule&) const = default;

private:
    std::vector<Cents> rho_;
};

/// v[agent][good] in cents, square, non-negative.
class ValueMatrix {
public:
    ValueMatrix() = default;
    explicit ValueMatrix(std::vector<std::vector<Cents>> v) : v_{std::move(v)} {
        for (const auto& row : v_) {
            if (row.size() != v_.size()) throw ArgumentError("value matrix must be n x n");
            for (Cents c : row)
                if (c < Cents{0}) throw ArgumentError("values must be non-negative");
        }
    }
    /// Every agent shares the same value vector.
    static ValueMatrix common(std::span<const Cents> values) {
        return ValueMatrix{std::vector<std::vector<Cents>>(values.size(),
                                                           std::vector<Cents>(values.begin(), values.end()))};
    }
    int size() const { return static_cast<int>(v_.size()); }
    Cents operator()(AgentId i, GoodId g) const { return v_.at(i).at(g); }
    const std::vector<std::vector<Cents>>& rows() const { return v_; }
    bool operator==(const ValueMatrix&) const = default;

private:
    std::vector<std::vector<Cents>> v_;
};

struct MarketInstance {
    int n = 0;
    std::vector<Good> goods;
    ValueMatrix values;
    RhoSchedule rho;

    MarketInstance() = default;
    MarketInstance(std::vector<Good> goods_, ValueMatrix values_, RhoSchedule rho_)
        : n{static_cast<int>(goods_.size())}, goods{std::move(goods_)}, values{std::move(values_)},
          rho{std::move(rho_)} {
        if (n < 1) throw ArgumentError("market needs at least one good");
        for (int g = 0; g < n; ++g)
            if (goods[g].id != g) throw ArgumentError("good ids must be 0..n-1 in order");
        if (values.size() != n || rho.size() != n)
            throw ArgumentError("market dimensions are inconsistent");
    }

    /// Goods labelled "g0", "g1", ... when labels do not matter.
    static MarketInstance unlabeled(ValueMatrix values, RhoSchedule rho) {
        std::vector<Good> goods;
        for (int g = 0; g < values.size(); ++g) goods.push_back({g, "g" + std::to_string(g)});
        return MarketInstance{std::move(goods), std::move(values), std::move(rho)};
    }
};

/// assignment[agent] = good; always a bijection.
class Matching {
public:
    Matching() = default;
    explicit Matching(std::vector<GoodId> assignment) : assignment_{std::move(assignment)} {
        if (!is_permutation_of_n(assignment_)) throw ArgumentError("matching is not a bijection");
    }
    int size() const { return static_cast<int>(assignment_.size()); }
    GoodId operator[](AgentId i) const { return assignment_.at(i); }
    const std::vector<GoodId>& assignment() const { return assignment_; }
    AgentId holder_of(GoodId g) const {
        const auto it = std::find(assignment_.begin(), assignment_.end(), g);
        return static_cast<AgentId>(it - assignment_.begin());
    }
    bool operator==(const Matching&) const = default;

private:
    std::vector<GoodId> assignment_;
};

struct Outcome {
    Matching matching;
    std::vector<int> received_rank;
    std::vector<Cents> utility;
    Cents welfare_total;
};

struct WelfareBreakdown {
    Cents total;
    Cents rho_component;
    Cents value_component;
};

/// v + rho(rank).
inline Cents utility(Cents value, int rank, const RhoSchedule& rho) { return value + rho(rank); }

inline int received_rank(const Matching& m, std::span<const RankList> reports, AgentId agent) {
    if (agent < 0 || agent >= m.size() || static_cast<std::size_t>(m.size()) != reports.size())
        throw InconsistencyError("agent is not matched under this report set");
    return reports[agent].rank(m[agent]);
}

inline Outcome make_outcome(const Matching& m, std::span<const RankList> reports, const MarketInstance& market) {
    Outcome out;
    out.matching = m;
    out.received_rank.resize(m.size());
    out.utility.resize(m.size());
    for (AgentId i = 0; i < m.size(); ++i) {
        out.received_rank[i] = received_rank(m, reports, i);
        out.utility[i] = utility(market.values(i, m[i]), out.received_rank[i], market.rho);
        out.welfare_total += out.utility[i];
    }
    return out;
}

inline WelfareBreakdown outcome_welfare(const Outcome& o, const RhoSchedule& rho) {
    WelfareBreakdown w;
    for (std::size_t i = 0; i < o.utility.size(); ++i) {
        w.total += o.utility[i];
        w.rho_component += rho(o.received_rank[i]);
    }
    w.value_component = w.total - w.rho_component;
    return w;
}

}  // namespace rankdep
