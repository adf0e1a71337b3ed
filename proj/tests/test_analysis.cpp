#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rankdep/analysis/ols.hpp"
#include "rankdep/analysis/report.hpp"
#include "rankdep/analysis/session.hpp"
#include "rankdep/analysis/synthetic.hpp"

using namespace rankdep;
using namespace rankdep::analysis;

namespace {

const std::string kHeader(kSessionHeader);

SubjectRecord subject(std::array<std::int64_t, 5> values, std::vector<GoodId> report, GoodId got, std::int64_t p2) {
    SubjectRecord r;
    r.subject_id = "s";
    for (int g = 0; g < 5; ++g) r.phase1_value[g] = Cents{values[g]};
    r.report = RankList(std::move(report));
    r.good_received = got;
    r.phase2_value = Cents{p2};
    return r;
}

// Lab mean values: backpack 28.24, bottle 22.56, notebook 9.11, mug 6.53, pens 5.33.
const std::array<std::int64_t, 5> kLab{2824, 2256, 911, 653, 533};

}  // namespace

TEST(Session, ReadsTwoRows) {
    std::istringstream in(kHeader + "\n" +
                          "a1,rsd,1,28.24,22.56,9.11,6.53,5.33,backpack,bottle,notebook,mug,pens,bottle,25.00,3,20,30,2,1,0\n"
                          "a2,boston,2,10,9,8,7,6,pens,mug,notebook,bottle,backpack,pens,6.50,5,10,11,0,0,4\n");
    const auto rs = read_session(in);
    ASSERT_EQ(rs.size(), 2u);
    EXPECT_EQ(rs[0].rank_received(), 2);
    EXPECT_EQ(rs[1].treatment, MechanismKind::BOSTON);
    EXPECT_EQ(rs[1].rank_received(), 1);
    EXPECT_EQ(rs[1].phase2_value, Cents{650});
}

TEST(Session, NonPermutationNamesTheRow) {
    std::istringstream in(kHeader + "\n" +
                          "a1,rsd,1,28.24,22.56,9.11,6.53,5.33,backpack,bottle,notebook,mug,pens,bottle,25.00,3,20,30,2,1,0\n"
                          "a2,rsd,1,28.24,22.56,9.11,6.53,5.33,backpack,bottle,notebook,mug,mug,bottle,25.00,3,20,30,2,1,0\n");
    try {
        read_session(in);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
}

TEST(Session, RejectsBadHeaderAndCells) {
    std::istringstream bad_header("subject_id,treatment\n");
    EXPECT_THROW(read_session(bad_header), DataError);
    std::istringstream bad_money(kHeader + "\n" +
                                 "a1,rsd,1,x,22.56,9.11,6.53,5.33,backpack,bottle,notebook,mug,pens,bottle,25.00,3,20,30,2,1,0\n");
    EXPECT_THROW(read_session(bad_money), DataError);
    std::istringstream bad_range(kHeader + "\n" +
                                 "a1,rsd,1,1,2,3,4,5,backpack,bottle,notebook,mug,pens,bottle,25.00,3,20,30,4,1,0\n");
    EXPECT_THROW(read_session(bad_range), DataError);
    std::istringstream empty("");
    EXPECT_THROW(read_session(empty), DataError);
}

TEST(Session, HeaderOnlyIsEmpty) {
    std::istringstream in(kHeader + "\n");
    EXPECT_TRUE(read_session(in).empty());
}

TEST(Session, RoundTrip) {
    SyntheticSpec spec;
    spec.groups_per_treatment = 3;
    spec.noise_sd_cents = 150;
    spec.misreport_prob = 0.3;
    const auto rs = generate_session(spec);
    std::stringstream buf;
    write_session(buf, rs);
    EXPECT_EQ(read_session(buf), rs);
}

TEST(NetValue, Examples) {
    auto r = subject(kLab, {0, 1, 2, 3, 4}, 2, 911);
    EXPECT_EQ(net_value(r).net_value, Cents{0});
    r.phase1_value[2] = Cents{1450};
    r.phase2_value = Cents{1700};
    EXPECT_EQ(net_value(r).net_value, Cents{250});
    EXPECT_EQ(net_value(r).rank, 3);
}

TEST(NetValue, PlantedRhoRecoveredExactlyWithoutNoise) {
    SyntheticSpec spec;
    spec.seed = 4;
    const auto nv = net_values(generate_session(spec));
    for (int j = 1; j <= 5; ++j) {
        ASSERT_GT(nv.by_rank[j - 1].count, 0);
        EXPECT_EQ(nv.by_rank[j - 1].mean, Rational::of(spec.rho[j - 1])) << "rank " << j;
        EXPECT_EQ(nv.by_rank[j - 1].sd, 0.0);
    }
}

TEST(Truth, Examples) {
    const auto truthful = subject(kLab, {0, 1, 2, 3, 4}, 0, 2824);
    for (auto s : {TruthScope::All, TruthScope::Top1, TruthScope::Top2})
        EXPECT_TRUE(classify_truthful(truthful, Cents{0}, s));
    const auto bottle_first = subject(kLab, {1, 0, 2, 3, 4}, 0, 2824);
    EXPECT_FALSE(classify_truthful(bottle_first, Cents{200}, TruthScope::All));
    const auto swapped = subject(kLab, {0, 1, 2, 4, 3}, 0, 2824);
    EXPECT_TRUE(classify_truthful(swapped, Cents{200}, TruthScope::All));
    EXPECT_FALSE(classify_truthful(swapped, Cents{0}, TruthScope::All));
    EXPECT_TRUE(classify_truthful(swapped, Cents{0}, TruthScope::Top2));
    EXPECT_THROW(classify_truthful(swapped, Cents{-1}, TruthScope::All), ArgumentError);
}

TEST(Truth, RatesOnSmallSessions) {
    auto a = subject(kLab, {0, 1, 2, 3, 4}, 0, 2824);
    auto b = subject(kLab, {4, 3, 2, 1, 0}, 0, 2824);
    const auto t = truth_rate_table({a, b}, {Cents{0}});
    EXPECT_DOUBLE_EQ(t.find("pooled", Cents{0}, TruthScope::All)->rate(), 0.5);
    EXPECT_DOUBLE_EQ(t.find("rsd", Cents{0}, TruthScope::All)->rate(), 0.5);
    EXPECT_EQ(t.find("boston", Cents{0}, TruthScope::All)->subjects, 0);
}

TEST(Truth, AllTruthfulSyntheticSession) {
    const auto t = truth_rate_table(generate_session({}), {Cents{0}, Cents{200}});
    for (const auto& r : t.rates) EXPECT_DOUBLE_EQ(r.rate(), 1.0);
}

TEST(Truth, RatesAreMonotoneInTolerance) {
    SyntheticSpec spec;
    spec.misreport_prob = 0.2;
    spec.value_sd_cents = 400;
    const auto rs = generate_session(spec);
    const auto t = truth_rate_table(rs, {Cents{0}, Cents{100}, Cents{200}, Cents{500}});
    for (std::string_view tr : {"rsd", "boston", "pooled"})
        for (auto s : {TruthScope::All, TruthScope::Top1, TruthScope::Top2}) {
            double prev = -1;
            for (Cents tol : {Cents{0}, Cents{100}, Cents{200}, Cents{500}}) {
                const double r = t.find(tr, tol, s)->rate();
                EXPECT_GE(r, prev);
                prev = r;
            }
        }
}

TEST(Truth, RecoveredMisreportRateWithinBinomialBand) {
    SyntheticSpec spec;
    spec.groups_per_treatment = 100;
    spec.misreport_prob = 0.25;
    spec.seed = 12;
    const auto rs = generate_session(spec);
    const auto t = truth_rate_table(rs, {Cents{0}});
    // A reversed report is never truthful; a truthful one always is.
    const double n = static_cast<double>(rs.size());
    const double rate = t.find("pooled", Cents{0}, TruthScope::All)->rate();
    EXPECT_LE(std::abs(rate - 0.75), 4 * std::sqrt(0.25 * 0.75 / n));
}

TEST(SessionWelfare, SumsGroupsOfFive) {
    std::vector<SubjectRecord> g;
    for (std::int64_t p2 : {1000, 2000, 3000, 2000, 1000}) {
        auto r = subject(kLab, {0, 1, 2, 3, 4}, 0, p2);
        r.group_id = 7;
        g.push_back(r);
    }
    const auto w = welfare_total(g);
    EXPECT_EQ(w.treatments[0].mean, Rational{9000});
    EXPECT_TRUE(w.warnings.empty());
    g.pop_back();
    const auto partial = welfare_total(g);
    EXPECT_EQ(partial.treatments[0].groups, 0);
    EXPECT_EQ(partial.warnings.size(), 1u);
}

TEST(SessionWelfare, AllZero) {
    std::vector<SubjectRecord> g(5, subject({0, 0, 0, 0, 0}, {0, 1, 2, 3, 4}, 0, 0));
    EXPECT_EQ(welfare_total(g).treatments[2].mean, Rational{0});
}

TEST(Ols, ExactLine) {
    Eigen::MatrixXd X(5, 2);
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = i;
        X(i, 1) = 1;
        y(i) = 2.0 * i;
    }
    const auto f = ols_fit(y, X, {"x", "_cons"});
    EXPECT_NEAR(f.coef(0), 2.0, 1e-12);
    EXPECT_NEAR(f.coef(1), 0.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Ols, InterceptOnlyIsMean) {
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 10;
    const auto f = ols_fit(y, Eigen::MatrixXd::Ones(4, 1), {"_cons"});
    EXPECT_NEAR(f.coef(0), 4.0, 1e-12);
}

TEST(Ols, ResidualsOrthogonalAndCoefficientsRecovered) {
    PhiloxStream rng{77, 0};
    constexpr int n = 400;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1 + static_cast<double>(rng.uniform_below(5));
        X(i, 1) = rng.normal() * 3;
        X(i, 2) = 1;
        y(i) = -0.8 * X(i, 0) + 0.3 * X(i, 1) + 4 + rng.normal() * 2;
    }
    for (auto se : {SeKind::Classical, SeKind::HC1}) {
        const auto f = ols_fit(y, X, {"rank", "z", "_cons"}, se);
        EXPECT_LT((X.transpose() * f.residuals).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LE(std::abs(f.coef(0) + 0.8), 3 * f.se(0));
        EXPECT_LE(std::abs(f.coef(1) - 0.3), 3 * f.se(1));
        EXPECT_LE(std::abs(f.coef(2) - 4.0), 3 * f.se(2));
        EXPECT_LT(f.p(0), 1e-6);
    }
}

TEST(Ols, RankDeficiencyNamesTheColumn) {
    Eigen::MatrixXd X(4, 3);
    X << 1, 2, 1, 2, 4, 1, 3, 6, 1, 4, 8, 1;
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 5;
    try {
        ols_fit(y, X, {"a", "b", "_cons"});
        FAIL();
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos) << e.what();
    }
}

TEST(Ols, NetValueDesignRecoversPlantedRankSlope) {
    // rho linear in rank: NV = 3 - 0.5 rank, so the rank slope is -0.5 exactly.
    SyntheticSpec spec;
    spec.rho = {Cents{250}, Cents{200}, Cents{150}, Cents{100}, Cents{50}};
    spec.noise_sd_cents = 100;
    spec.seed = 5;
    const auto rs = generate_session(spec);
    const auto d = net_value_design(rs, false);
    const auto f = ols_fit(d.y, d.X, d.names);
    EXPECT_LE(std::abs(f.coef(0) + 0.5), 3 * f.se(0));
    EXPECT_LE(std::abs(f.coef(1) - 3.0), 3 * f.se(1));
}

TEST(Report, EmptySessionIsValid) {
    const auto a = analyze_session({});
    EXPECT_EQ(a.subjects, 0);
    const auto j = analysis_json(a, {});
    EXPECT_EQ(j["subjects"], 0);
}

TEST(Report, SyntheticSessionRunsEveryColumn) {
    SyntheticSpec spec;
    spec.noise_sd_cents = 200;
    spec.misreport_prob = 0.1;
    const auto a = analyze_session(generate_session(spec));
    EXPECT_EQ(a.regressions.size(), 8u);
    for (const auto& r : a.regressions) EXPECT_TRUE(r.fit.has_value()) << r.column << " " << r.error;
    ASSERT_TRUE(a.trend[0].second.has_value());
    EXPECT_LT(a.trend[0].second->p_normal, 0.05);
}
