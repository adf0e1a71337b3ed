#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "rankdep/core.hpp"
#include "rankdep/money.hpp"
#include "rankdep/prng.hpp"

using namespace rankdep;

namespace {
RhoSchedule rho(std::initializer_list<std::int64_t> xs) {
    std::vector<Cents> v;
    for (auto x : xs) v.emplace_back(x);
    return RhoSchedule{v};
}
}  // namespace

TEST(Money, ParseAndFormat) {
    EXPECT_EQ(Cents::parse("16.56"), Cents{1656});
    EXPECT_EQ(Cents::parse("-0.69"), Cents{-69});
    EXPECT_EQ(Cents::parse("20"), Cents{2000});
    EXPECT_EQ(Cents::parse("$3.5"), Cents{350});
    EXPECT_THROW(Cents::parse("1.234"), std::invalid_argument);
    EXPECT_THROW(Cents::parse("abc"), std::invalid_argument);
    EXPECT_THROW(Cents::parse(""), std::invalid_argument);
    EXPECT_EQ(Cents{1656}.str(), "16.56");
    EXPECT_EQ(Cents{-69}.str(), "-0.69");
    EXPECT_EQ(Cents{5}.str(), "0.05");
}

TEST(Money, RationalArithmeticIsExact) {
    const Rational third{1, 3};
    EXPECT_EQ(third + third + third, Rational{1});
    EXPECT_EQ(Rational(2300, 3) - Rational{700}, Rational(200, 3));
    EXPECT_EQ(Rational(4, 6), Rational(2, 3));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
    EXPECT_EQ(Rational(-2, -4), Rational(1, 2));
    EXPECT_THROW(Rational{1} / Rational{0}, std::domain_error);
}

TEST(Utility, SpecExamples) {
    EXPECT_EQ(utility(Cents{100}, 1, rho({10, 0, 0})), Cents{110});
    EXPECT_EQ(utility(Cents{500}, 3, rho({0, 0, 0})), Cents{500});
    EXPECT_EQ(utility(Cents{2256}, 2, rho({800, 200, 0, 0, 0})), Cents{2456});
}

TEST(Utility, RankOutOfRangeThrows) { EXPECT_THROW(utility(Cents{1}, 4, rho({1, 0, 0})), ArgumentError); }

TEST(RhoSchedule, MustBeNonIncreasing) {
    EXPECT_THROW(rho({0, 1}), ArgumentError);
    EXPECT_NO_THROW(rho({287, 100, 50, 0, -69}));
}

TEST(RankList, RejectsNonPermutation) {
    EXPECT_THROW(RankList({0, 0, 1}), ArgumentError);
    EXPECT_THROW(RankList({0, 3, 1}), ArgumentError);
    const RankList r({2, 0, 1});
    EXPECT_EQ(r.rank(2), 1);
    EXPECT_EQ(r.rank(1), 3);
}

TEST(ReceivedRank, SnackExample) {
    // Goods: Pizza 0, Chips 1, Soda 2, Pretzels 3.
    const std::vector<RankList> boston{RankList({0, 3, 1, 2}), RankList({0, 1, 2, 3}), RankList({0, 1, 3, 2}),
                                       RankList({3, 2, 1, 0})};
    EXPECT_EQ(received_rank(Matching{{2, 0, 1, 3}}, boston, 0), 4);
    EXPECT_EQ(received_rank(Matching{{2, 0, 1, 3}}, boston, 1), 1);
    const std::vector<RankList> rsd{RankList({1, 0, 2, 3}), RankList({0, 1, 2, 3}), RankList({0, 3, 1, 2}),
                                    RankList({3, 2, 1, 0})};
    EXPECT_EQ(received_rank(Matching{{1, 0, 3, 2}}, rsd, 2), 2);
    EXPECT_EQ(received_rank(Matching{{1, 0, 3, 2}}, rsd, 0), 1);
}

TEST(ReceivedRank, MismatchedSizesThrow) {
    const std::vector<RankList> two{RankList::identity(2), RankList::identity(2)};
    EXPECT_THROW(received_rank(Matching{{0, 1, 2}}, two, 0), InconsistencyError);
}

TEST(Welfare, ThreeAgentExampleArithmetic) {
    // v = (1, 0.7, 0), rho = (0.1, 0, 0). The utility model gives 1.80 for the
    // truthful RSD outcome and 1.90 for the Boston equilibrium outcome.
    const auto market = MarketInstance::unlabeled(
        ValueMatrix::common(std::vector<Cents>{Cents{100}, Cents{70}, Cents{0}}), rho({10, 0, 0}));
    const std::vector<RankList> truthful(3, RankList::identity(3));
    const auto o = make_outcome(Matching{{0, 1, 2}}, truthful, market);
    EXPECT_EQ(o.welfare_total, Cents{180});
    const std::vector<RankList> eq{RankList::identity(3), RankList::identity(3), RankList({1, 2, 0})};
    const auto b = make_outcome(Matching{{0, 2, 1}}, eq, market);
    EXPECT_EQ(b.welfare_total, Cents{190});
    EXPECT_EQ(b.welfare_total - o.welfare_total, Cents{10});
    const auto w = outcome_welfare(b, market.rho);
    EXPECT_EQ(w.rho_component, Cents{20});
    EXPECT_EQ(w.value_component, Cents{170});
}

TEST(Welfare, AllZero) {
    const auto market = MarketInstance::unlabeled(ValueMatrix::common(std::vector<Cents>(4)), RhoSchedule::zero(4));
    const std::vector<RankList> r(4, RankList::identity(4));
    EXPECT_EQ(make_outcome(Matching{{3, 1, 0, 2}}, r, market).welfare_total, Cents{0});
}

TEST(Market, ValidatesDimensions) {
    EXPECT_THROW(MarketInstance::unlabeled(ValueMatrix::common(std::vector<Cents>(3)), RhoSchedule::zero(2)),
                 ArgumentError);
    EXPECT_THROW(ValueMatrix({{Cents{1}, Cents{-1}}, {Cents{0}, Cents{0}}}), ArgumentError);
}

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
    using B = std::array<std::uint32_t, 4>;
    EXPECT_EQ(PhiloxStream::block({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(PhiloxStream::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(PhiloxStream::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    PhiloxStream a{42, 0}, b{42, 0}, c{42, 1}, d{43, 0};
    std::set<std::uint64_t> first;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        first.insert(x);
    }
    EXPECT_NE(PhiloxStream(42, 0).next_u64(), c.next_u64());
    EXPECT_NE(PhiloxStream(42, 0).next_u64(), d.next_u64());
    EXPECT_EQ(first.size(), 100u);
}

TEST(Philox, UniformBelowIsUnbiased) {
    PhiloxStream rng{9, 0};
    constexpr int kBound = 6, kDraws = 600000;
    std::array<int, kBound> counts{};
    for (int i = 0; i < kDraws; ++i) ++counts[rng.uniform_below(kBound)];
    const double expect = static_cast<double>(kDraws) / kBound;
    const double sd = std::sqrt(kDraws * (1.0 / kBound) * (1.0 - 1.0 / kBound));
    for (int c : counts) EXPECT_LT(std::abs(c - expect), 4 * sd);
}

TEST(Philox, NormalMoments) {
    PhiloxStream rng{5, 3};
    constexpr int kDraws = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < kDraws; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s / kDraws, 0.0, 4.0 / std::sqrt(kDraws));
    EXPECT_NEAR(s2 / kDraws, 1.0, 4.0 * std::sqrt(2.0 / kDraws));
}
