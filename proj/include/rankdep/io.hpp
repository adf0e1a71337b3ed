#pragma once
// JSON and CSV documents for markets, report profiles, symmetric instances,
// solver and simulation reports, and raw elicitation responses.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankdep/core.hpp"
#include "rankdep/elicitation.hpp"
#include "rankdep/equilibrium.hpp"
#include "rankdep/errors.hpp"
#include "rankdep/mechanisms.hpp"
#include "rankdep/simulation.hpp"

namespace rankdep::io {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
}

namespace detail {

inline const Json& field(const Json& j, const char* name, const std::string& doc) {
    if (!j.is_object() || !j.contains(name)) throw DataError(doc + ": missing field \"" + name + "\"");
    return j.at(name);
}

inline std::int64_t integer(const Json& j, const std::string& what) {
    if (!j.is_number_integer()) throw DataError(what + ": expected an integer");
    return j.get<std::int64_t>();
}

inline std::vector<Cents> cents_array(const Json& j, const std::string& what) {
    if (!j.is_array()) throw DataError(what + ": expected an array of cents");
    std::vector<Cents> out;
    for (const auto& x : j) out.emplace_back(integer(x, what));
    return out;
}

/// Wraps library argument errors raised while building objects from a document.
template <typename F>
auto build(const std::string& doc, F&& f) {
    try {
        return f();
    } catch (const ArgumentError& e) {
        throw DataError(doc + ": " + e.what());
    }
}

}  // namespace detail

inline Json rational_json(const Rational& r) { return Json{{"cents", r.to_double()}, {"exact", r.str()}}; }

// ---- market: { "n", "goods", "values", "rho" } ----

inline MarketInstance market_from_json(const Json& j, const std::string& doc = "market") {
    const auto n = detail::integer(detail::field(j, "n", doc), doc + ".n");
    const auto& goods_j = detail::field(j, "goods", doc);
    const auto& values_j = detail::field(j, "values", doc);
    if (!goods_j.is_array() || !values_j.is_array()) throw DataError(doc + ": goods and values must be arrays");
    if (static_cast<std::int64_t>(goods_j.size()) != n) throw DataError(doc + ": goods has length != n");
    std::vector<Good> goods;
    for (std::size_t g = 0; g < goods_j.size(); ++g) {
        if (!goods_j[g].is_string()) throw DataError(doc + ".goods: labels must be strings");
        goods.push_back({static_cast<GoodId>(g), goods_j[g].get<std::string>()});
    }
    std::vector<std::vector<Cents>> rows;
    for (const auto& row : values_j) rows.push_back(detail::cents_array(row, doc + ".values"));
    const auto rho = detail::cents_array(detail::field(j, "rho", doc), doc + ".rho");
    return detail::build(doc, [&] {
        return MarketInstance{std::move(goods), ValueMatrix{std::move(rows)}, RhoSchedule{rho}};
    });
}

inline Json market_to_json(const MarketInstance& m) {
    Json goods = Json::array(), values = Json::array(), rho = Json::array();
    for (const auto& g : m.goods) goods.push_back(g.label);
    for (const auto& row : m.values.rows()) {
        Json r = Json::array();
        for (Cents c : row) r.push_back(c.value());
        values.push_back(r);
    }
    for (int j = 1; j <= m.n; ++j) rho.push_back(m.rho(j).value());
    return Json{{"n", m.n}, {"goods", goods}, {"values", values}, {"rho", rho}};
}

// ---- reports: { "reports": [[good ids]] } ----

inline std::vector<RankList> reports_from_json(const Json& j, const std::string& doc = "reports") {
    const auto& arr = detail::field(j, "reports", doc);
    if (!arr.is_array()) throw DataError(doc + ".reports: expected an array");
    std::vector<RankList> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_array()) throw DataError(doc + ".reports[" + std::to_string(i) + "]: expected an array");
        std::vector<GoodId> order;
        for (const auto& g : arr[i]) order.push_back(static_cast<GoodId>(detail::integer(g, doc + ".reports")));
        out.push_back(detail::build(doc + ".reports[" + std::to_string(i) + "]", [&] { return RankList{order}; }));
        if (out.back().size() != out.front().size()) throw DataError(doc + ": reports have different lengths");
    }
    if (out.empty()) throw DataError(doc + ": no reports");
    return out;
}

inline Json reports_to_json(std::span<const RankList> reports) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(r.order());
    return Json{{"reports", arr}};
}

// ---- symmetric instance: { "n", "v1", "v2", "vbar", "rho" } ----

inline SymmetricInstance symmetric_from_json(const Json& j, const std::string& doc = "instance") {
    const auto n = detail::integer(detail::field(j, "n", doc), doc + ".n");
    const Cents v1{detail::integer(detail::field(j, "v1", doc), doc + ".v1")};
    const Cents v2{detail::integer(detail::field(j, "v2", doc), doc + ".v2")};
    const Cents vbar{detail::integer(detail::field(j, "vbar", doc), doc + ".vbar")};
    const auto rho = detail::cents_array(detail::field(j, "rho", doc), doc + ".rho");
    return detail::build(doc, [&] { return SymmetricInstance{static_cast<int>(n), v1, v2, vbar, RhoSchedule{rho}}; });
}

inline Json symmetric_to_json(const SymmetricInstance& s) {
    Json rho = Json::array();
    for (int j = 1; j <= s.n; ++j) rho.push_back(s.rho(j).value());
    return Json{{"n", s.n}, {"v1", s.v1.value()}, {"v2", s.v2.value()}, {"vbar", s.vbar.value()}, {"rho", rho}};
}

// ---- outcomes and reports produced by the library ----

inline Json outcome_json(const Outcome& o, const MarketInstance& market) {
    Json agents = Json::array();
    for (AgentId i = 0; i < o.matching.size(); ++i) {
        const GoodId g = o.matching[i];
        agents.push_back(Json{{"agent", i},
                              {"good", g},
                              {"label", market.goods[g].label},
                              {"rank", o.received_rank[i]},
                              {"utility_cents", o.utility[i].value()}});
    }
    const auto w = outcome_welfare(o, market.rho);
    return Json{{"assignment", agents},
                {"welfare_cents", w.total.value()},
                {"rho_welfare_cents", w.rho_component.value()},
                {"value_welfare_cents", w.value_component.value()}};
}

inline Json group_eu_json(const GroupEu& eu) {
    return Json{{"x1_first", eu.x1_first ? rational_json(*eu.x1_first) : Json()},
                {"x2_first", eu.x2_first ? rational_json(*eu.x2_first) : Json()}};
}

inline Json params_json(const SymmetricParams& p) {
    return Json{{"delta", rational_json(p.delta)},
                {"delta_prime", rational_json(p.delta_prime)},
                {"rho_bar", rational_json(p.rho_bar)},
                {"alpha", p.alpha ? Json{{"value", p.alpha->to_double()}, {"exact", p.alpha->str()}} : Json()}};
}

inline Json solution_json(const EquilibriumSolution& s, const SymmetricInstance& inst) {
    Json cands = Json::array(), eus = Json::array();
    for (std::size_t c = 0; c < s.n1_candidates.size(); ++c) {
        cands.push_back(s.n1_candidates[c]);
        Json e = group_eu_json(s.eu_at_candidates[c]);
        e["n1"] = s.n1_candidates[c];
        eus.push_back(e);
    }
    const auto w = equilibrium_welfare(s.mechanism, inst, s.canonical());
    Json range = s.has_range ? Json{{"lo", s.range_lo.to_double()},
                                    {"hi", s.range_hi.to_double()},
                                    {"lo_exact", s.range_lo.str()},
                                    {"hi_exact", s.range_hi.str()}}
                             : Json();
    return Json{{"mechanism", std::string(to_string(s.mechanism))},
                {"n1_candidates", cands},
                {"n1", s.canonical()},
                {"range", range},
                {"corner_all_top", s.corner_all_top},
                {"clamped", s.clamped},
                {"eu_at_candidates", eus},
                {"welfare", Json{{"rho_component", rational_json(w.rho_component)}, {"total", rational_json(w.total)}}}};
}

inline Json mean_se_json(const MeanSe& m) { return Json{{"mean_dollars", m.mean}, {"se_dollars", m.se}}; }

inline Json sim_report_json(const SimReport& r, MechanismKind kind) {
    Json strategies = Json::array();
    for (const auto& s : r.per_strategy)
        strategies.push_back(Json{{"strategy", s.label}, {"agents", s.agents}, {"eu", mean_se_json(s.eu)}});
    return Json{{"mechanism", std::string(to_string(kind))},
                {"replications", r.replications},
                {"seed", r.seed},
                {"rank_histogram", r.rank_histogram},
                {"rank_fractions", r.rank_fractions()},
                {"welfare", mean_se_json(r.welfare)},
                {"rho_welfare", mean_se_json(r.rho_welfare)},
                {"per_strategy", strategies},
                {"per_agent_eu_dollars", r.per_agent_eu}};
}

inline constexpr std::string_view kReplicationCsvHeader = "rep,agent,good,rank,utility_cents";

inline void write_replication_row(std::ostream& out, const ReplicationRecord& r) {
    out << r.rep << ',' << r.agent << ',' << r.good << ',' << r.rank << ',' << r.utility.value() << '\n';
}

// ---- elicitation responses: subject_id,task_id,screen1_row,screen2_row,switch_row ----

inline constexpr std::string_view kElicitationHeader = "subject_id,task_id,screen1_row,screen2_row,switch_row";

/// task_id "holt_laury" or "loss_aversion" is a lottery task; any other id is an MPL for that good.
struct ElicitationRow {
    std::string subject_id;
    std::string task_id;
    std::optional<MplResponse> mpl;
    std::optional<LotteryResponse> lottery;
};

inline std::optional<LotteryTask> lottery_task_of(std::string_view task_id) {
    if (task_id == "holt_laury") return LotteryTask::HOLT_LAURY;
    if (task_id == "loss_aversion") return LotteryTask::LOSS_AVERSION;
    return std::nullopt;
}

inline std::vector<ElicitationRow> read_elicitation_csv(std::istream& in, const std::string& doc = "responses") {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) {
            while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
            while (!c.empty() && c.front() == ' ') c.erase(c.begin());
            cells.push_back(c);
        }
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    auto as_int = [&](const std::string& s, const char* col, std::size_t row) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw DataError(doc + ": column " + col + ": non-numeric cell '" + s + "'", row);
        }
    };
    std::string line;
    if (!std::getline(in, line)) throw DataError(doc + ": missing header", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kElicitationHeader) throw DataError(doc + ": header must be " + std::string(kElicitationHeader), 1);
    std::vector<ElicitationRow> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
        const auto cells = split(line);
        if (cells.size() != 5) throw DataError(doc + ": expected 5 cells", row);
        ElicitationRow r{cells[0], cells[1], std::nullopt, std::nullopt};
        try {
            if (const auto task = lottery_task_of(r.task_id)) {
                LotteryResponse lr{*task, as_int(cells[4], "switch_row", row)};
                check_row(lr.switch_row, "switch_row");
                r.lottery = lr;
            } else {
                MplResponse m{as_int(cells[2], "screen1_row", row), as_int(cells[3], "screen2_row", row)};
                check_row(m.screen1_row, "screen1_row", 0);
                check_row(m.screen2_row, "screen2_row");
                r.mpl = m;
            }
        } catch (const ArgumentError& e) {
            throw DataError(doc + ": " + e.what(), row);
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace rankdep::io
