#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "rankdep/equilibrium.hpp"
#include "rankdep/simulation.hpp"

using namespace rankdep;

namespace {

SymmetricInstance five_agent() {
    return {5, Cents{2824}, Cents{2256}, Cents{700}, RhoSchedule{{Cents{800}, Cents{200}, {}, {}, {}}}};
}
SymmetricInstance three_agent() { return {3, Cents{100}, Cents{70}, Cents{0}, RhoSchedule{{Cents{10}, {}, {}}}}; }

const StrategyEstimate& strategy(const SimReport& r, const std::string& label) {
    for (const auto& s : r.per_strategy)
        if (s.label == label) return s;
    throw std::runtime_error("missing strategy " + label);
}

}  // namespace

TEST(Simulate, ThreeAgentExampleWelfareIsDeterministic) {
    const auto market = three_agent().market();
    const std::vector<RankList> eq{RankList::identity(3), RankList::identity(3), RankList({1, 2, 0})};
    const auto b = simulate(MechanismKind::BOSTON, market, StrategyProfile::fixed(eq), 5000, 3);
    EXPECT_DOUBLE_EQ(b.welfare.mean, 1.90);
    EXPECT_EQ(b.welfare.se, 0.0);
    const std::vector<RankList> truthful(3, RankList::identity(3));
    const auto r = simulate(MechanismKind::RSD, market, StrategyProfile::fixed(truthful), 5000, 3);
    EXPECT_DOUBLE_EQ(r.welfare.mean, 1.80);
    EXPECT_EQ(r.welfare.se, 0.0);
}

// The Boston closed form values round-1 losers at delta, an approximation, so the
// oracle here is exact enumeration of the structured profile.
TEST(Simulate, BostonStructuredMatchesExactEnumeration) {
    const auto s = five_agent();
    const auto rep = simulate(MechanismKind::BOSTON, s.market(), StrategyProfile::structured(5, 3), 300000, 21, 2);
    const auto eu = structured_group_eu(MechanismKind::BOSTON, s, 3, false);
    const auto& x1 = strategy(rep, "x1_first");
    const auto& x2 = strategy(rep, "x2_first");
    EXPECT_LE(std::abs(x1.eu.mean - eu.x1_first->to_double() / 100.0), 4 * x1.eu.se);
    EXPECT_LE(std::abs(x2.eu.mean - eu.x2_first->to_double() / 100.0), 4 * x2.eu.se);
}

TEST(Simulate, SdStructuredMatchesClosedForm) {
    const auto s = five_agent();
    const auto rep = simulate(MechanismKind::RSD, s.market(), StrategyProfile::structured(5, 4), 300000, 22, 2);
    const auto eu = sd_group_eu(s, 4);
    const auto& x1 = strategy(rep, "x1_first");
    EXPECT_LE(std::abs(x1.eu.mean - eu.x1_first->to_double() / 100.0), 4 * x1.eu.se);
}

TEST(Simulate, DistinctFirstChoicesAllRankOne) {
    const auto market = MarketInstance::unlabeled(ValueMatrix::common(std::vector<Cents>(4, Cents{1})),
                                                  RhoSchedule::zero(4));
    const std::vector<RankList> r{RankList({0, 1, 2, 3}), RankList({1, 0, 2, 3}), RankList({2, 0, 1, 3}),
                                  RankList({3, 0, 1, 2})};
    for (auto kind : {MechanismKind::RSD, MechanismKind::BOSTON})
        EXPECT_DOUBLE_EQ(rank_distribution(kind, market, StrategyProfile::fixed(r), 1000, 1)[0], 1.0);
}

TEST(Simulate, IdenticalListsGiveUniformRanks) {
    const auto market = MarketInstance::unlabeled(ValueMatrix::common(std::vector<Cents>(4, Cents{1})),
                                                  RhoSchedule::zero(4));
    const std::vector<RankList> r(4, RankList::identity(4));
    const auto f = rank_distribution(MechanismKind::RSD, market, StrategyProfile::fixed(r), 40000, 1);
    for (double x : f) EXPECT_DOUBLE_EQ(x, 0.25);  // each order hands out every rank exactly once
}

TEST(Simulate, IdenticalThreadCountsIndependent) {
    const auto s = five_agent();
    const auto a = simulate(MechanismKind::BOSTON, s.market(), StrategyProfile::structured(5, 3), 20000, 9, 1);
    const auto b = simulate(MechanismKind::BOSTON, s.market(), StrategyProfile::structured(5, 3), 20000, 9, 8);
    EXPECT_EQ(a.rank_histogram, b.rank_histogram);
    EXPECT_EQ(a.welfare.mean, b.welfare.mean);
    EXPECT_EQ(a.welfare.se, b.welfare.se);
    EXPECT_EQ(a.per_agent_eu, b.per_agent_eu);
    const auto c = simulate(MechanismKind::BOSTON, s.market(), StrategyProfile::structured(5, 3), 20000, 10, 1);
    EXPECT_NE(a.per_agent_eu, c.per_agent_eu);
}

TEST(Simulate, RecordsCallbackSeesEveryAssignment) {
    const auto s = five_agent();
    std::int64_t count = 0, last_rep = -1;
    bool ordered = true;
    simulate(MechanismKind::RSD, s.market(), StrategyProfile::structured(5, 2), 100, 4, 4,
             [&](const ReplicationRecord& r) {
                 ++count;
                 if (r.rep < last_rep) ordered = false;
                 last_rep = r.rep;
             });
    EXPECT_EQ(count, 500);
    EXPECT_TRUE(ordered);
}

TEST(Simulate, ThroughputAtLeast1e5RepsPerSecond) {
    const auto s = five_agent();
    constexpr std::int64_t kReps = 400000;
    const auto t0 = std::chrono::steady_clock::now();
    simulate(MechanismKind::BOSTON, s.market(), StrategyProfile::structured(5, 3), kReps, 5, 1);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_GE(kReps / secs, 1e5) << "reps/s = " << kReps / secs;
}

TEST(Simulate, RejectsBadArguments) {
    const auto s = five_agent();
    EXPECT_THROW(simulate(MechanismKind::RSD, s.market(), StrategyProfile::structured(5, 3), 0, 1), ArgumentError);
    EXPECT_THROW(simulate(MechanismKind::RSD, s.market(), StrategyProfile::structured(4, 3), 10, 1), ArgumentError);
}
