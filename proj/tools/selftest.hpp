#pragma once
// Golden examples run by `rankdep selftest`. One line per check.

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rankdep/analysis/measures.hpp"
#include "rankdep/analysis/stats.hpp"
#include "rankdep/core.hpp"
#include "rankdep/elicitation.hpp"
#include "rankdep/equilibrium.hpp"
#include "rankdep/mechanisms.hpp"
#include "rankdep/simulation.hpp"

namespace rankdep::cli {

namespace detail {

struct Checker {
    std::ostream& out;
    int failed = 0;
    int total = 0;

    template <class Actual>
    void check(const std::string& name, bool ok, const Actual& actual) {
        ++total;
        if (!ok) ++failed;
        std::ostringstream a;
        a << actual;
        out << (ok ? "PASS " : "FAIL ") << name << " (got " << a.str() << ")\n";
    }
};

inline std::vector<RankList> lists(std::initializer_list<std::vector<GoodId>> rows) {
    std::vector<RankList> out;
    for (const auto& r : rows) out.emplace_back(r);
    return out;
}

inline std::string matching_str(const Matching& m) {
    std::string s;
    for (int i = 0; i < m.size(); ++i) s += (i ? "," : "") + std::to_string(m[i]);
    return s;
}

}  // namespace detail

/// Returns true when every check passes.
inline bool run_selftest(std::ostream& out, int threads = 1) {
    detail::Checker c{out};
    using detail::lists;

    // Snack example. Goods: Pizza 0, Chips 1, Soda 2, Pretzels 3. Agents: Ann 0, Bob 1, Carol 2, Dave 3.
    {
        const auto rsd = lists({{1, 0, 2, 3}, {0, 1, 2, 3}, {0, 3, 1, 2}, {3, 2, 1, 0}});
        const Matching m = run_rsd(rsd, TieBreakOrder{{1, 2, 3, 0}});
        c.check("snack example rsd allocation", m == Matching{{1, 0, 3, 2}}, detail::matching_str(m));
        c.check("snack example rsd carol rank 2", received_rank(m, rsd, 2) == 2, received_rank(m, rsd, 2));
        c.check("snack example rsd pareto efficient", is_pareto_efficient(m, rsd), is_pareto_efficient(m, rsd));

        const auto bos = lists({{0, 3, 1, 2}, {0, 1, 2, 3}, {0, 1, 3, 2}, {3, 2, 1, 0}});
        const Matching b = run_boston(bos, TieBreakOrder{{1, 0, 2, 3}});
        c.check("snack example boston allocation", b == Matching{{2, 0, 1, 3}}, detail::matching_str(b));
        c.check("snack example boston ann rank 4", received_rank(b, bos, 0) == 4, received_rank(b, bos, 0));
    }

    // Utility model.
    c.check("utility 22.56 rank 2", utility(Cents{2256}, 2, RhoSchedule{{Cents{800}, Cents{200}, {}, {}, {}}}) ==
                                        Cents{2456},
            "24.56");

    // Three-agent example: v = (1, 0.7, 0), rho = (0.1, 0, 0).
    const SymmetricInstance s22{3, Cents{100}, Cents{70}, Cents{0}, RhoSchedule{{Cents{10}, {}, {}}}};
    {
        const auto market = s22.market();
        const auto truthful = lists({{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
        const Cents w_rsd = make_outcome(run_rsd(truthful, TieBreakOrder::identity(3)), truthful, market).welfare_total;
        c.check("three-agent example rsd welfare 1.90", w_rsd == Cents{190}, w_rsd);
        const auto eq = lists({{0, 1, 2}, {0, 1, 2}, {1, 2, 0}});
        const Cents w_b = make_outcome(run_boston(eq, TieBreakOrder::identity(3)), eq, market).welfare_total;
        c.check("three-agent example boston welfare 2.00", w_b == Cents{200}, w_b);

        const auto eu = exact_expected_utilities(MechanismKind::RSD, truthful, market, threads);
        c.check("three-agent example rsd eu 0.6 each", eu[0] == Rational{60} && eu[1] == eu[0] && eu[2] == eu[0], eu[0]);
        const auto dev = exact_expected_utilities(MechanismKind::BOSTON, eq, market, threads);
        c.check("three-agent example boston deviation eu 0.80", dev[2] == Rational{80}, dev[2]);
        c.check("three-agent example truth equilibrium rsd", check_truthtelling_equilibrium(MechanismKind::RSD, s22, threads),
                "true");
        c.check("three-agent example truth equilibrium boston",
                !check_truthtelling_equilibrium(MechanismKind::BOSTON, s22, threads), "false");
    }

    // Five-agent instance: n = 5, v = (28.24, 22.56, 7, 7, 7), rho = (8, 2, 0, 0, 0).
    const SymmetricInstance five{5, Cents{2824}, Cents{2256}, Cents{700},
                               RhoSchedule{{Cents{800}, Cents{200}, {}, {}, {}}}};
    {
        const auto p = symmetric_params(five);
        c.check("five-agent delta 7+2/3", p.delta == Rational{2300, 3}, p.delta);
        c.check("five-agent delta' 7", p.delta_prime == Rational{700}, p.delta_prime);
        const auto sd = solve_equilibrium(MechanismKind::RSD, five);
        const auto bo = solve_equilibrium(MechanismKind::BOSTON, five);
        c.check("five-agent n1 sd = 4", sd.canonical() == 4, sd.canonical());
        c.check("five-agent n1 boston = 3", bo.canonical() == 3, bo.canonical());
        c.check("five-agent brute force sd {4}", brute_force_equilibria(MechanismKind::RSD, five, threads) == std::vector<int>{4},
                "{4}");
        c.check("five-agent brute force boston {3}",
                brute_force_equilibria(MechanismKind::BOSTON, five, threads) == std::vector<int>{3}, "{3}");
        const auto wb = equilibrium_welfare(MechanismKind::BOSTON, five, 3).rho_component;
        const auto ws = equilibrium_welfare(MechanismKind::RSD, five, 4).rho_component;
        c.check("five-agent boston rho welfare 18.00", wb == Rational{1800}, wb);
        c.check("five-agent sd rho welfare 12.40", ws == Rational{1240}, ws);
        const auto g1 = boston_group_eu(five, 1);
        c.check("five-agent boston U_x1 at n1=1 is 36.24", g1.x1_first && *g1.x1_first == Rational{3624}, "36.24");
        const auto g4 = boston_group_eu(five, 4);
        c.check("five-agent boston U_x2 at n1=4 is 30.56", g4.x2_first && *g4.x2_first == Rational{3056}, "30.56");
    }

    // Elicitation.
    {
        const MplResponse r{16, 28};
        c.check("mpl (16,28) = 16.56", decode_mpl(r) == Cents{1656}, decode_mpl(r));
        c.check("mpl (1,50) = 2.00", decode_mpl({1, 50}) == Cents{200}, decode_mpl({1, 50}));
        c.check("mpl (50,1) = 50.02", decode_mpl({50, 1}) == Cents{5002}, decode_mpl({50, 1}));
        c.check("mpl draw1=10 keeps object", std::holds_alternative<KeepObject>(resolve_mpl_payment(r, 10, 1)),
                "keep");
        const auto p20 = resolve_mpl_payment(r, 20, 1);
        c.check("mpl draw1=20 pays 20.00",
                std::holds_alternative<MoneyPayment>(p20) && std::get<MoneyPayment>(p20).amount == Cents{2000},
                "money");
        const auto p16 = resolve_mpl_payment(r, 16, 40);
        c.check("mpl draw1=16 draw2=40 pays 16.80",
                std::holds_alternative<MoneyPayment>(p16) && std::get<MoneyPayment>(p16).amount == Cents{1680},
                "money");
        const Cents hl = resolve_lottery_payment({LotteryTask::HOLT_LAURY, 30}, 50, 0.99);
        c.check("holt-laury switch 30 draw 50 pays 38.00", hl == Cents{3800}, hl);
        const Cents hl2 = resolve_lottery_payment({LotteryTask::HOLT_LAURY, 50}, 1, 0.01);
        c.check("holt-laury switch 50 draw 1 coin .01 pays 24.00", hl2 == Cents{2400}, hl2);
        const Cents la = resolve_lottery_payment({LotteryTask::LOSS_AVERSION, 10}, 5, 0.75);
        c.check("loss-aversion switch 10 draw 5 coin .75 pays 20.00", la == Cents{2000}, la);
    }

    // Statistics fixtures.
    {
        const auto jt = analysis::jonckheere_terpstra({{5, 4}, {3, 2}, {1}});
        c.check("jt exact p = 1/30", jt.p_exact && std::abs(*jt.p_exact - 1.0 / 30.0) < 1e-12, *jt.p_exact);
        const auto w = analysis::wilcoxon_ranksum({1, 2}, {3, 4});
        c.check("wilcoxon exact p = 1/3", w.p_exact && std::abs(*w.p_exact - 1.0 / 3.0) < 1e-12, *w.p_exact);
    }

    // Simulation: the Boston equilibrium profile has a deterministic welfare.
    {
        const auto eq = lists({{0, 1, 2}, {0, 1, 2}, {1, 2, 0}});
        const auto rep = simulate(MechanismKind::BOSTON, s22.market(), StrategyProfile::fixed(eq), 1000, 7, threads);
        c.check("simulate three-agent example boston welfare 2.0 se 0",
                std::abs(rep.welfare.mean - 2.0) < 1e-9 && rep.welfare.se == 0.0, rep.welfare.mean);
    }

    out << (c.total - c.failed) << "/" << c.total << " checks passed\n";
    return c.failed == 0;
}

}  // namespace rankdep::cli
