#pragma once
// Synthetic sessions with a planted rho schedule. The generator inverts the
// Net Value identity: phase2 = phase1[received] + rho(rank) + noise.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rankdep/analysis/session.hpp"
#include "rankdep/mechanisms.hpp"
#include "rankdep/prng.hpp"

namespace rankdep::analysis {

/// Mean Phase II goods values in the lab sessions (backpack, bottle, notebook, mug, pens).
inline constexpr std::array<std::int64_t, kSessionGoods> kLabMeanCents{2824, 2256, 911, 653, 533};

struct SyntheticSpec {
    int groups_per_treatment = 20;
    std::array<Cents, kSessionGoods> rho{Cents{287}, Cents{100}, Cents{50}, Cents{0}, Cents{-69}};
    double noise_sd_cents = 0.0;    ///< Gaussian noise on the Phase II value
    double value_sd_cents = 200.0;  ///< spread of Phase I values around the lab means
    double misreport_prob = 0.0;    ///< chance a subject submits the reversed truthful list
    std::uint64_t seed = 1;
};

/// Phase I values are lab mean + $8.00 + N(0, value_sd), floored at $10.00 so
/// that Phase II values stay positive for moderate noise.
inline std::vector<SubjectRecord> generate_session(const SyntheticSpec& spec) {
    PhiloxStream rng{spec.seed, 0};
    std::vector<SubjectRecord> out;
    int subject = 0;
    for (MechanismKind kind : {MechanismKind::RSD, MechanismKind::BOSTON}) {
        for (int g = 0; g < spec.groups_per_treatment; ++g) {
            std::vector<SubjectRecord> group(kSessionGoods);
            std::vector<RankList> reports;
            for (auto& r : group) {
                r.subject_id = "s" + std::to_string(++subject);
                r.treatment = kind;
                r.group_id = g + 1;
                for (int x = 0; x < kSessionGoods; ++x) {
                    const double v = kLabMeanCents[x] + 800.0 + spec.value_sd_cents * rng.normal();
                    r.phase1_value[x] = Cents{std::max<std::int64_t>(1000, std::llround(v))};
                }
                std::vector<GoodId> order(kSessionGoods);
                std::iota(order.begin(), order.end(), 0);
                std::stable_sort(order.begin(), order.end(),
                                 [&](GoodId a, GoodId b) { return r.phase1_value[a] > r.phase1_value[b]; });
                if (rng.uniform01() < spec.misreport_prob) std::reverse(order.begin(), order.end());
                r.report = RankList{order};
                reports.push_back(r.report);
            }
            const auto tie = TieBreakOrder::draw(kSessionGoods, rng);
            const Matching m = run_mechanism(kind, reports, tie);
            for (int i = 0; i < kSessionGoods; ++i) {
                auto& r = group[i];
                r.good_received = m[i];
                const double noise = spec.noise_sd_cents > 0 ? spec.noise_sd_cents * rng.normal() : 0.0;
                const std::int64_t v2 = r.phase1_value[r.good_received].value() +
                                        spec.rho[r.rank_received() - 1].value() + std::llround(noise);
                r.phase2_value = Cents{std::max<std::int64_t>(0, v2)};
                r.phase1_order = 4 + static_cast<int>(rng.uniform_below(17));
                r.risk_row = 1 + static_cast<int>(rng.uniform_below(50));
                r.loss_row = 1 + static_cast<int>(rng.uniform_below(50));
                r.crt = static_cast<int>(rng.uniform_below(4));
                r.female = static_cast<int>(rng.uniform_below(2));
                r.practice = static_cast<int>(rng.uniform_below(21));
                out.push_back(std::move(r));
            }
        }
    }
    return out;
}

}  // namespace rankdep::analysis
