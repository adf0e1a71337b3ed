#pragma once
// Outcome measures on session rows: Net Value by received rank, truth-telling
// classification against Phase I values, and group welfare sums.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rankdep/analysis/session.hpp"
#include "rankdep/money.hpp"

namespace rankdep::analysis {

struct NetValueRecord {
    std::string subject_id;
    MechanismKind treatment = MechanismKind::RSD;
    int rank = 1;
    Cents net_value;
};

struct RankSummary {
    int rank = 1;
    int count = 0;
    Rational mean;    ///< cents, exact
    double sd = 0.0;  ///< cents, sample sd (n-1); 0 when count < 2
    double se() const { return count > 0 ? sd / std::sqrt(static_cast<double>(count)) : 0.0; }
};

struct NetValues {
    std::vector<NetValueRecord> records;
    std::vector<RankSummary> by_rank;  ///< ranks 1..5, in order

    std::vector<Cents> values_at_rank(int rank) const {
        std::vector<Cents> out;
        for (const auto& r : records)
            if (r.rank == rank) out.push_back(r.net_value);
        return out;
    }
};

inline NetValueRecord net_value(const SubjectRecord& r) {
    return {r.subject_id, r.treatment, r.rank_received(), r.phase2_value - r.phase1_value[r.good_received]};
}

inline NetValues net_values(const std::vector<SubjectRecord>& records) {
    NetValues out;
    for (const auto& r : records) out.records.push_back(net_value(r));
    for (int j = 1; j <= kSessionGoods; ++j) {
        RankSummary s;
        s.rank = j;
        std::int64_t sum = 0;
        for (const auto& nv : out.records)
            if (nv.rank == j) {
                ++s.count;
                sum += nv.net_value.value();
            }
        if (s.count > 0) s.mean = Rational{sum, s.count};
        if (s.count > 1) {
            const double m = s.mean.to_double();
            double ss = 0.0;
            for (const auto& nv : out.records)
                if (nv.rank == j) ss += (nv.net_value.value() - m) * (nv.net_value.value() - m);
            s.sd = std::sqrt(ss / (s.count - 1));
        }
        out.by_rank.push_back(s);
    }
    return out;
}

/// Which listed goods are checked against the goods listed below them.
enum class TruthScope { All, Top1, Top2 };

inline std::string_view to_string(TruthScope s) {
    switch (s) {
        case TruthScope::All: return "all";
        case TruthScope::Top1: return "top1";
        case TruthScope::Top2: return "top2";
    }
    return "all";
}

/// False iff some good in the checked positions is listed above a good whose
/// Phase I value exceeds it by more than `tolerance`.
inline bool classify_truthful(const SubjectRecord& r, Cents tolerance, TruthScope scope) {
    if (tolerance < Cents{0}) throw ArgumentError("tolerance must be non-negative");
    const int checked = scope == TruthScope::All ? kSessionGoods : scope == TruthScope::Top1 ? 1 : 2;
    const auto& order = r.report.order();
    for (int p = 0; p < checked; ++p)
        for (int q = p + 1; q < kSessionGoods; ++q)
            if (r.phase1_value[order[q]] - r.phase1_value[order[p]] > tolerance) return false;
    return true;
}

/// Rank the received good would have had under the Phase I values (ties share the best rank).
inline int implied_truthful_rank(const SubjectRecord& r) {
    int above = 0;
    for (int g = 0; g < kSessionGoods; ++g)
        if (r.phase1_value[g] > r.phase1_value[r.good_received]) ++above;
    return 1 + above;
}

/// Regressor "truthful": the received good was listed higher than its Phase I value implies.
inline bool ranked_above_implied(const SubjectRecord& r) { return r.rank_received() < implied_truthful_rank(r); }

struct TruthRate {
    std::string treatment;  ///< "rsd", "boston" or "pooled"
    Cents tolerance;
    TruthScope scope = TruthScope::All;
    int truthful = 0;
    int subjects = 0;
    double rate() const { return subjects > 0 ? static_cast<double>(truthful) / subjects : 0.0; }
};

struct TruthReport {
    std::vector<TruthRate> rates;  ///< treatment, then tolerance, then scope

    const TruthRate* find(std::string_view treatment, Cents tol, TruthScope scope) const {
        for (const auto& r : rates)
            if (r.treatment == treatment && r.tolerance == tol && r.scope == scope) return &r;
        return nullptr;
    }
};

inline TruthReport truth_rate_table(const std::vector<SubjectRecord>& records, const std::vector<Cents>& tolerances) {
    TruthReport out;
    for (std::string_view t : {"rsd", "boston", "pooled"})
        for (Cents tol : tolerances)
            for (TruthScope s : {TruthScope::All, TruthScope::Top1, TruthScope::Top2}) {
                TruthRate r;
                r.treatment = std::string(t);
                r.tolerance = tol;
                r.scope = s;
                for (const auto& rec : records) {
                    if (t != "pooled" && to_string(rec.treatment) != t) continue;
                    ++r.subjects;
                    if (classify_truthful(rec, tol, s)) ++r.truthful;
                }
                out.rates.push_back(r);
            }
    return out;
}

struct GroupWelfare {
    MechanismKind treatment = MechanismKind::RSD;
    int group_id = 0;
    int members = 0;
    Cents sum;         ///< Phase II values of received goods
    Cents phase1_sum;  ///< Phase I values of the same goods
};

struct TreatmentWelfare {
    std::string treatment;  ///< "rsd", "boston" or "pooled"
    int groups = 0;
    Rational mean;         ///< cents
    Rational phase1_mean;  ///< cents
    std::vector<Cents> group_sums;
};

struct WelfareSummary {
    std::vector<TreatmentWelfare> treatments;  ///< rsd, boston, pooled
    std::vector<GroupWelfare> excluded;
    std::vector<std::string> warnings;
};

inline constexpr int kGroupSize = 5;

/// Sums Phase II values per complete group of five, then averages per treatment.
inline WelfareSummary welfare_total(const std::vector<SubjectRecord>& records) {
    std::map<std::pair<int, int>, GroupWelfare> groups;
    for (const auto& r : records) {
        auto& g = groups[{static_cast<int>(r.treatment), r.group_id}];
        g.treatment = r.treatment;
        g.group_id = r.group_id;
        ++g.members;
        g.sum += r.phase2_value;
        g.phase1_sum += r.phase1_value[r.good_received];
    }
    WelfareSummary out;
    for (const auto& [key, g] : groups)
        if (g.members != kGroupSize) {
            out.excluded.push_back(g);
            out.warnings.push_back(std::string(to_string(g.treatment)) + " group " + std::to_string(g.group_id) +
                                   " has " + std::to_string(g.members) + " members; excluded from welfare");
        }
    for (std::string_view t : {"rsd", "boston", "pooled"}) {
        TreatmentWelfare tw;
        tw.treatment = std::string(t);
        std::int64_t total = 0, total1 = 0;
        for (const auto& [key, g] : groups) {
            if (g.members != kGroupSize || (t != "pooled" && to_string(g.treatment) != t)) continue;
            ++tw.groups;
            total += g.sum.value();
            total1 += g.phase1_sum.value();
            tw.group_sums.push_back(g.sum);
        }
        if (tw.groups > 0) {
            tw.mean = Rational{total, tw.groups};
            tw.phase1_mean = Rational{total1, tw.groups};
        }
        out.treatments.push_back(std::move(tw));
    }
    return out;
}

}  // namespace rankdep::analysis
