// rankdep: command-line front end. See MANUAL.md for the contract.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankdep/analysis/report.hpp"
#include "rankdep/analysis/session.hpp"
#include "rankdep/core.hpp"
#include "rankdep/elicitation.hpp"
#include "rankdep/equilibrium.hpp"
#include "rankdep/io.hpp"
#include "rankdep/mechanisms.hpp"
#include "rankdep/simulation.hpp"
#include "selftest.hpp"

namespace {

using namespace rankdep;
using io::Json;

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

/// --config: a JSON object whose keys are option long names. Keys under an
/// object named after a subcommand apply to that subcommand only.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
        Json j;
        try {
            j = Json::parse(in);
        } catch (const Json::parse_error& e) {
            throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        flatten(j, {}, items);
        return items;
    }

private:
    static std::string scalar(const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }
    static void flatten(const Json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                // CLI11 opens a section when it sees the "++" marker item.
                out.push_back(CLI::ConfigItem{p, "++", {}});
                flatten(value, p, out);
                out.push_back(CLI::ConfigItem{p, "--", {}});
                continue;
            }
            CLI::ConfigItem item{parents, key, {}};
            if (value.is_array())
                for (const auto& x : value) item.inputs.push_back(scalar(x));
            else
                item.inputs.push_back(scalar(value));
            out.push_back(std::move(item));
        }
    }
};

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw ArgumentError("bad integer list '" + s + "'");
        }
        if (used != item.size()) throw ArgumentError("bad integer list '" + s + "'");
        out.push_back(v);
    }
    return out;
}

Cents money_flag(const std::string& s, const std::string& flag) {
    try {
        return Cents::parse(s);
    } catch (const std::invalid_argument& e) {
        throw ArgumentError(flag + ": " + e.what());
    }
}

// ---- mechanism ----
struct MechanismArgs {
    std::string kind = "rsd", reports, market, order;
    std::uint64_t seed = 1;
};

int run_mechanism_cmd(const MechanismArgs& a) {
    const auto kind = parse_mechanism(a.kind);
    const Json doc = io::read_json_file(a.reports);
    const auto reports = io::reports_from_json(doc, a.reports);
    const int n = reports.front().size();
    if (static_cast<int>(reports.size()) != n) throw DataError(a.reports + ": need one report per good");

    MarketInstance market;
    if (!a.market.empty()) {
        market = io::market_from_json(io::read_json_file(a.market), a.market);
        if (market.n != n) throw DataError(a.market + ": market size differs from the report profile");
    } else {
        std::vector<Good> goods;
        for (int g = 0; g < n; ++g) {
            std::string label = "g" + std::to_string(g);
            if (doc.contains("goods") && doc["goods"].is_array() && static_cast<int>(doc["goods"].size()) == n &&
                doc["goods"][g].is_string())
                label = doc["goods"][g].get<std::string>();
            goods.push_back({g, label});
        }
        market = MarketInstance{goods, ValueMatrix{std::vector<std::vector<Cents>>(n, std::vector<Cents>(n))},
                                RhoSchedule::zero(n)};
    }

    TieBreakOrder order;
    if (!a.order.empty()) {
        auto o = parse_int_list(a.order);
        if (static_cast<int>(o.size()) != n) throw ArgumentError("--order must list every agent once");
        order = TieBreakOrder{std::move(o)};
    } else {
        order = TieBreakOrder::draw(n, a.seed, 0);
    }
    const Matching m = run_mechanism(kind, reports, order);
    const Outcome out = make_outcome(m, reports, market);
    Json j{{"mechanism", std::string(to_string(kind))}, {"order", order.order()}};
    if (a.order.empty()) j["seed"] = a.seed;
    const Json o = io::outcome_json(out, market);
    for (const auto& [k, v] : o.items()) j[k] = v;
    j["pareto_efficient"] = n <= kMaxParetoAgents ? Json(is_pareto_efficient(m, reports)) : Json();
    emit(j);
    return kExitOk;
}

// ---- expect ----
struct ExpectArgs {
    std::string kind = "rsd", reports, market;
    int threads = 1;
};

int run_expect_cmd(const ExpectArgs& a) {
    const auto kind = parse_mechanism(a.kind);
    const auto reports = io::reports_from_json(io::read_json_file(a.reports), a.reports);
    const auto market = io::market_from_json(io::read_json_file(a.market), a.market);
    if (market.n != static_cast<int>(reports.size()))
        throw DataError(a.reports + ": report count differs from the market size");
    const auto eu = exact_expected_utilities(kind, reports, market, a.threads);
    Json agents = Json::array();
    Rational total;
    for (std::size_t i = 0; i < eu.size(); ++i) {
        Json e = io::rational_json(eu[i]);
        e["agent"] = i;
        agents.push_back(e);
        total = total + eu[i];
    }
    emit(Json{{"mechanism", std::string(to_string(kind))},
              {"expected_utility", agents},
              {"expected_welfare", io::rational_json(total)}});
    return kExitOk;
}

// ---- equilibrium ----
struct EquilibriumArgs {
    std::string instance;
    bool brute_force = false, truth = false;
    int n1 = -1;
    int threads = 1;
};

int run_equilibrium_cmd(const EquilibriumArgs& a) {
    const auto inst = io::symmetric_from_json(io::read_json_file(a.instance), a.instance);
    if (inst.n < 3) throw DataError(a.instance + ": equilibrium analysis needs n >= 3");
    const auto params = symmetric_params(inst);
    const auto boston = solve_equilibrium(MechanismKind::BOSTON, inst);
    const auto rsd = solve_equilibrium(MechanismKind::RSD, inst);
    const auto wb = equilibrium_welfare(MechanismKind::BOSTON, inst, boston.canonical());
    const auto ws = equilibrium_welfare(MechanismKind::RSD, inst, rsd.canonical());

    Json j{{"instance", io::symmetric_to_json(inst)},
           {"params", io::params_json(params)},
           {"n1_boston", boston.canonical()},
           {"n1_rsd", rsd.canonical()},
           {"boston", io::solution_json(boston, inst)},
           {"rsd", io::solution_json(rsd, inst)},
           {"ordering_holds", rsd.n1_candidates.front() >= boston.n1_candidates.back()},
           {"welfare_boston_ge_rsd", wb.rho_component >= ws.rho_component}};
    if (a.n1 >= 0) {
        if (a.n1 > inst.n) throw ArgumentError("--n1 must be in 0..n");
        Json g = Json::object();
        g["n1"] = a.n1;
        g["boston"] = a.n1 >= 1 && a.n1 <= inst.n - 1 ? io::group_eu_json(boston_group_eu(inst, a.n1)) : Json();
        g["rsd"] = io::group_eu_json(sd_group_eu(inst, a.n1));
        j["group_eu"] = g;
    }
    if (a.brute_force) {
        if (inst.n > kMaxBruteForceAgents)
            throw ArgumentError("--brute-force needs n <= " + std::to_string(kMaxBruteForceAgents));
        j["brute_force"] = Json{{"boston", brute_force_equilibria(MechanismKind::BOSTON, inst, a.threads)},
                                {"rsd", brute_force_equilibria(MechanismKind::RSD, inst, a.threads)}};
    }
    if (a.truth) {
        if (inst.n > kMaxTruthCheckAgents)
            throw ArgumentError("--truth needs n <= " + std::to_string(kMaxTruthCheckAgents));
        j["truthtelling_equilibrium"] =
            Json{{"boston", check_truthtelling_equilibrium(MechanismKind::BOSTON, inst, a.threads)},
                 {"rsd", check_truthtelling_equilibrium(MechanismKind::RSD, inst, a.threads)}};
    }
    emit(j);
    return kExitOk;
}

// ---- simulate ----
struct SimulateArgs {
    std::string kind = "rsd", market, reports, instance, lower = "common", csv;
    int n1 = -1;
    std::int64_t reps = 100000;
    std::uint64_t seed = 1;
    int threads = 1;
};

int run_simulate_cmd(const SimulateArgs& a) {
    const auto kind = parse_mechanism(a.kind);
    MarketInstance market;
    StrategyProfile profile;
    if (!a.instance.empty()) {
        if (!a.market.empty() || !a.reports.empty())
            throw ArgumentError("use either --instance with --n1, or --market with --reports");
        const auto inst = io::symmetric_from_json(io::read_json_file(a.instance), a.instance);
        if (a.n1 < 0 || a.n1 > inst.n) throw ArgumentError("--n1 in 0..n is required with --instance");
        LowerGoodsDraw lower;
        if (a.lower == "common")
            lower = LowerGoodsDraw::Common;
        else if (a.lower == "independent")
            lower = LowerGoodsDraw::Independent;
        else
            throw ArgumentError("--lower must be common or independent");
        market = inst.market();
        profile = StrategyProfile::structured(inst.n, a.n1, lower);
    } else {
        if (a.market.empty() || a.reports.empty())
            throw ArgumentError("simulate needs --instance and --n1, or --market and --reports");
        market = io::market_from_json(io::read_json_file(a.market), a.market);
        const auto reports = io::reports_from_json(io::read_json_file(a.reports), a.reports);
        if (static_cast<int>(reports.size()) != market.n)
            throw DataError(a.reports + ": report count differs from the market size");
        profile = StrategyProfile::fixed(reports);
    }
    SimReport rep;
    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        if (!out) throw DataError("cannot write " + a.csv);
        out << io::kReplicationCsvHeader << '\n';
        rep = simulate(kind, market, profile, a.reps, a.seed, a.threads,
                       [&](const ReplicationRecord& r) { io::write_replication_row(out, r); });
    } else {
        rep = simulate(kind, market, profile, a.reps, a.seed, a.threads);
    }
    emit(io::sim_report_json(rep, kind));
    return kExitOk;
}

// ---- analyze ----
struct AnalyzeArgs {
    std::string session, tolerance = "2.00", se = "classical", out_dir, plot_csv;
};

int run_analyze_cmd(const AnalyzeArgs& a) {
    analysis::AnalysisOptions opt;
    opt.tolerance = money_flag(a.tolerance, "--tolerance");
    if (opt.tolerance < Cents{0}) throw ArgumentError("--tolerance must be non-negative");
    if (a.se == "classical")
        opt.se = analysis::SeKind::Classical;
    else if (a.se == "hc1")
        opt.se = analysis::SeKind::HC1;
    else
        throw ArgumentError("--se must be classical or hc1");
    const auto records = analysis::load_session(a.session);
    const auto result = analysis::analyze_session(records, opt);
    const Json j = analysis::analysis_json(result, opt);
    for (const auto& w : result.welfare.warnings) std::cerr << "warning: " << w << '\n';
    if (!a.plot_csv.empty()) {
        std::ofstream out(a.plot_csv);
        if (!out) throw DataError("cannot write " + a.plot_csv);
        analysis::write_net_value_csv(out, records);
    }
    if (a.out_dir.empty()) {
        emit(j);
        return kExitOk;
    }
    std::filesystem::create_directories(a.out_dir);
    auto open = [&](const char* name) {
        std::ofstream f(std::filesystem::path(a.out_dir) / name);
        if (!f) throw DataError("cannot write " + (std::filesystem::path(a.out_dir) / name).string());
        return f;
    };
    {
        auto f = open("report.json");
        f << j.dump(2) << '\n';
    }
    {
        auto f = open("net_value_regressions.csv");
        analysis::write_regression_table(f, result, false);
    }
    {
        auto f = open("truth_rates.csv");
        analysis::write_truth_table(f, result);
    }
    {
        auto f = open("welfare.csv");
        analysis::write_welfare_table(f, result);
    }
    {
        auto f = open("rank_dummy_regressions.csv");
        analysis::write_regression_table(f, result, true);
    }
    return kExitOk;
}

// ---- elicit-decode ----
struct ElicitArgs {
    std::string responses;
    int screen1 = -1, screen2 = -1, draw1 = -1, draw2 = -1;
    bool resolve = false;
    std::uint64_t seed = 1;
};

Json payment_json(const MplPayment& p) {
    if (std::holds_alternative<KeepObject>(p)) return Json{{"outcome", "keep_object"}};
    return Json{{"outcome", "money"}, {"amount_cents", std::get<MoneyPayment>(p).amount.value()}};
}

int run_elicit_cmd(const ElicitArgs& a) {
    if (a.responses.empty()) {
        if (a.screen1 < 0 || a.screen2 < 0)
            throw ArgumentError("elicit-decode needs --responses, or --screen1 and --screen2");
        const MplResponse r{a.screen1, a.screen2};
        Json j{{"screen1_row", r.screen1_row}, {"screen2_row", r.screen2_row},
               {"value_cents", decode_mpl(r).value()}};
        if (a.draw1 >= 0) {
            if (a.draw2 < 0) throw ArgumentError("--draw1 needs --draw2");
            j["payment"] = payment_json(resolve_mpl_payment(r, a.draw1, a.draw2));
        }
        emit(j);
        return kExitOk;
    }
    std::ifstream in(a.responses);
    if (!in) throw DataError("cannot open " + a.responses);
    const auto rows = io::read_elicitation_csv(in, a.responses);
    Json out = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        Json j{{"subject_id", r.subject_id}, {"task_id", r.task_id}};
        // Row i draws from Philox stream (seed, i): draw1, draw2 or draw, then coin.
        PhiloxStream rng{a.seed, i};
        if (r.mpl) {
            j["screen1_row"] = r.mpl->screen1_row;
            j["screen2_row"] = r.mpl->screen2_row;
            j["value_cents"] = decode_mpl(*r.mpl).value();
            if (a.resolve) {
                const int d1 = 1 + static_cast<int>(rng.uniform_below(kMplRows));
                const int d2 = 1 + static_cast<int>(rng.uniform_below(kMplRows));
                Json p = payment_json(resolve_mpl_payment(*r.mpl, d1, d2));
                p["draw1"] = d1;
                p["draw2"] = d2;
                j["payment"] = p;
            }
        } else {
            j["switch_row"] = r.lottery->switch_row;
            if (r.lottery->task == LotteryTask::LOSS_AVERSION)
                j["loss_at_switch_cents"] = loss_aversion_loss(r.lottery->switch_row).value();
            if (a.resolve) {
                const int d = 1 + static_cast<int>(rng.uniform_below(kMplRows));
                const double coin = rng.uniform01();
                j["payment"] = Json{{"draw", d},
                                    {"coin", coin},
                                    {"amount_cents", resolve_lottery_payment(*r.lottery, d, coin).value()}};
            }
        }
        out.push_back(j);
    }
    emit(Json{{"responses", out}});
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rankdep: matching mechanisms under rankings-dependent utility"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file with option defaults; command-line flags win");

    MechanismArgs mech;
    auto* c_mech = app.add_subcommand("mechanism", "run RSD or Boston once on a report profile");
    c_mech->add_option("--kind", mech.kind, "rsd or boston")->capture_default_str();
    c_mech->add_option("--reports", mech.reports, "reports JSON")->required()->check(CLI::ExistingFile);
    c_mech->add_option("--market", mech.market, "market JSON (values and rho)")->check(CLI::ExistingFile);
    c_mech->add_option("--order", mech.order, "tie-break order, agent ids by priority, e.g. 1,0,2,3");
    c_mech->add_option("--seed", mech.seed, "seed for the order draw when --order is absent")->capture_default_str();

    ExpectArgs exp;
    auto* c_exp = app.add_subcommand("expect", "exact expected utilities over all tie-break orders (n <= 8)");
    c_exp->add_option("--kind", exp.kind, "rsd or boston")->capture_default_str();
    c_exp->add_option("--reports", exp.reports, "reports JSON")->required()->check(CLI::ExistingFile);
    c_exp->add_option("--market", exp.market, "market JSON (values and rho)")->required()->check(CLI::ExistingFile);
    c_exp->add_option("--threads", exp.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    EquilibriumArgs eq;
    auto* c_eq = app.add_subcommand("equilibrium", "solve the symmetric environment for both mechanisms");
    c_eq->add_option("--instance", eq.instance, "symmetric instance JSON")->required()->check(CLI::ExistingFile);
    c_eq->add_flag("--brute-force", eq.brute_force, "add exhaustive equilibrium sets (n <= 6)");
    c_eq->add_flag("--truth", eq.truth, "add the truth-telling equilibrium check (n <= 6)");
    c_eq->add_option("--n1", eq.n1, "also report group expected utilities at this n1");
    c_eq->add_option("--threads", eq.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo over tie-break orders and strategy draws");
    c_sim->add_option("--kind", sim.kind, "rsd or boston")->capture_default_str();
    c_sim->add_option("--market", sim.market, "market JSON; use with --reports")->check(CLI::ExistingFile);
    c_sim->add_option("--reports", sim.reports, "fixed reports JSON; use with --market")->check(CLI::ExistingFile);
    c_sim->add_option("--instance", sim.instance, "symmetric instance JSON; use with --n1")->check(CLI::ExistingFile);
    c_sim->add_option("--n1", sim.n1, "agents ranking x1 first (structured profile)");
    c_sim->add_option("--lower", sim.lower, "common or independent lower-goods ranking")->capture_default_str();
    c_sim->add_option("--reps", sim.reps, "replications")->capture_default_str()->check(CLI::PositiveNumber);
    c_sim->add_option("--seed", sim.seed, "base seed")->capture_default_str();
    c_sim->add_option("--threads", sim.threads, "worker threads; output does not depend on it")->capture_default_str()->check(CLI::PositiveNumber);
    c_sim->add_option("--csv", sim.csv, "write per-replication records here");

    AnalyzeArgs an;
    auto* c_an = app.add_subcommand("analyze", "Net Value, truth-telling, welfare, tests and regressions");
    c_an->add_option("--session", an.session, "session CSV")->required()->check(CLI::ExistingFile);
    c_an->add_option("--tolerance", an.tolerance, "truth-telling tolerance in dollars")->capture_default_str();
    c_an->add_option("--se", an.se, "classical or hc1")->capture_default_str();
    c_an->add_option("--out", an.out_dir, "write report.json and table CSVs to this directory");
    c_an->add_option("--plot-csv", an.plot_csv, "write per-subject Net Values for plotting");

    ElicitArgs el;
    auto* c_el = app.add_subcommand("elicit-decode", "decode price-list responses and resolve payments");
    c_el->add_option("--responses", el.responses, "responses CSV")->check(CLI::ExistingFile);
    c_el->add_option("--screen1", el.screen1, "screen-1 row, 1..50");
    c_el->add_option("--screen2", el.screen2, "screen-2 row, 1..50");
    c_el->add_option("--draw1", el.draw1, "payment draw for screen 1");
    c_el->add_option("--draw2", el.draw2, "payment draw for screen 2");
    c_el->add_flag("--resolve", el.resolve, "draw payments for every CSV row");
    c_el->add_option("--seed", el.seed, "seed for --resolve draws")->capture_default_str();

    int st_threads = 1;
    auto* c_st = app.add_subcommand("selftest", "run the built-in golden examples");
    c_st->add_option("--threads", st_threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*c_mech) return run_mechanism_cmd(mech);
        if (*c_exp) return run_expect_cmd(exp);
        if (*c_eq) return run_equilibrium_cmd(eq);
        if (*c_sim) return run_simulate_cmd(sim);
        if (*c_an) return run_analyze_cmd(an);
        if (*c_el) return run_elicit_cmd(el);
        if (*c_st) return rankdep::cli::run_selftest(std::cout, st_threads) ? kExitOk : kExitData;
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
