#pragma once
// Whole-session analysis: JSON report and CSV tables for the Net Value
// regressions, truth-telling rates and welfare.

#include <ostream>
#include <string>
#include <vector>

#include "rankdep/analysis/measures.hpp"
#include "rankdep/analysis/ols.hpp"
#include "rankdep/analysis/session.hpp"
#include "rankdep/analysis/stats.hpp"
#include "rankdep/io.hpp"

namespace rankdep::analysis {

using io::Json;

struct AnalysisOptions {
    Cents tolerance{200};
    SeKind se = SeKind::Classical;
};

struct Regression {
    std::string column;     ///< "(1)".."(5)" net value models, "D (1)".."D (3)" rank dummy models
    std::string treatment;  ///< rsd, boston or pooled
    std::optional<OlsResult> fit;
    std::string error;
};

struct AnalysisResult {
    int subjects = 0;
    std::vector<std::pair<std::string, NetValues>> net_values;  ///< rsd, boston, pooled
    std::vector<std::pair<std::string, std::optional<JtResult>>> trend;
    TruthReport truth;
    std::vector<Cents> tolerances;
    struct TruthTest {
        Cents tolerance;
        TruthScope scope;
        std::optional<WilcoxonResult> test;
    };
    std::vector<TruthTest> truth_tests;
    WelfareSummary welfare;
    std::optional<WilcoxonResult> welfare_test;
    std::vector<Regression> regressions;
};

namespace detail {

inline std::vector<SubjectRecord> subset(const std::vector<SubjectRecord>& rs, std::string_view treatment) {
    std::vector<SubjectRecord> out;
    for (const auto& r : rs)
        if (treatment == "pooled" || to_string(r.treatment) == treatment) out.push_back(r);
    return out;
}

inline Regression regress(std::string column, std::string treatment, const Design& d, SeKind se) {
    Regression r{std::move(column), std::move(treatment), std::nullopt, {}};
    try {
        r.fit = ols_fit(d.y, d.X, d.names, se);
    } catch (const ArgumentError& e) {
        r.error = e.what();
    }
    return r;
}

inline std::string fixed(double x, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << x;
    return os.str();
}

inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(); }

}  // namespace detail

inline AnalysisResult analyze_session(const std::vector<SubjectRecord>& records, const AnalysisOptions& opt = {}) {
    AnalysisResult a;
    a.subjects = static_cast<int>(records.size());
    a.tolerances = {Cents{0}};
    if (opt.tolerance != Cents{0}) a.tolerances.push_back(opt.tolerance);

    for (std::string_view t : {"rsd", "boston", "pooled"}) {
        auto nv = net_values(detail::subset(records, t));
        std::vector<std::vector<double>> groups;
        for (int j = 1; j <= kSessionGoods; ++j) {
            std::vector<double> g;
            for (Cents c : nv.values_at_rank(j)) g.push_back(static_cast<double>(c.value()));
            if (!g.empty()) groups.push_back(std::move(g));
        }
        std::optional<JtResult> jt;
        if (groups.size() >= 2) jt = jonckheere_terpstra(groups, Trend::Decreasing);
        a.trend.emplace_back(std::string(t), jt);
        a.net_values.emplace_back(std::string(t), std::move(nv));
    }

    a.truth = truth_rate_table(records, a.tolerances);
    const auto rsd = detail::subset(records, "rsd"), boston = detail::subset(records, "boston");
    for (Cents tol : a.tolerances)
        for (TruthScope s : {TruthScope::All, TruthScope::Top1, TruthScope::Top2}) {
            AnalysisResult::TruthTest tt{tol, s, std::nullopt};
            if (!rsd.empty() && !boston.empty()) {
                std::vector<double> x, y;
                for (const auto& r : rsd) x.push_back(classify_truthful(r, tol, s) ? 1.0 : 0.0);
                for (const auto& r : boston) y.push_back(classify_truthful(r, tol, s) ? 1.0 : 0.0);
                tt.test = wilcoxon_ranksum(x, y);
            }
            a.truth_tests.push_back(tt);
        }

    a.welfare = welfare_total(records);
    if (!a.welfare.treatments[0].group_sums.empty() && !a.welfare.treatments[1].group_sums.empty()) {
        std::vector<double> x, y;
        for (Cents c : a.welfare.treatments[0].group_sums) x.push_back(static_cast<double>(c.value()));
        for (Cents c : a.welfare.treatments[1].group_sums) y.push_back(static_cast<double>(c.value()));
        a.welfare_test = wilcoxon_ranksum(x, y);
    }

    if (!records.empty()) {
        a.regressions.push_back(detail::regress("(1)", "rsd", net_value_design(rsd, false), opt.se));
        a.regressions.push_back(detail::regress("(2)", "rsd", net_value_design(rsd, true), opt.se));
        a.regressions.push_back(detail::regress("(3)", "boston", net_value_design(boston, false), opt.se));
        a.regressions.push_back(detail::regress("(4)", "boston", net_value_design(boston, true), opt.se));
        a.regressions.push_back(detail::regress("(5)", "pooled", net_value_design(records, true), opt.se));
        a.regressions.push_back(detail::regress("D (1)", "rsd", rank_dummy_design(rsd), opt.se));
        a.regressions.push_back(detail::regress("D (2)", "boston", rank_dummy_design(boston), opt.se));
        a.regressions.push_back(detail::regress("D (3)", "pooled", rank_dummy_design(records), opt.se));
    }
    return a;
}

inline Json jt_json(const JtResult& r) {
    return Json{{"statistic", r.statistic}, {"null_mean", r.mean},     {"null_variance", r.variance},
                {"n", r.n},                 {"p_normal", r.p_normal}, {"p_exact", r.p_exact ? Json(*r.p_exact) : Json()}};
}

inline Json wilcoxon_json(const WilcoxonResult& r) {
    return Json{{"rank_sum", r.statistic},
                {"null_mean", r.expected},
                {"n", r.n},
                {"p_normal", r.p_normal},
                {"p_exact", r.p_exact ? Json(*r.p_exact) : Json()}};
}

inline Json ols_json(const OlsResult& f) {
    Json coefs = Json::array();
    for (std::size_t i = 0; i < f.names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        coefs.push_back(Json{{"name", f.names[i]},
                             {"coef", f.coef(k)},
                             {"se", detail::number_or_null(f.se(k))},
                             {"p", detail::number_or_null(f.p(k))},
                             {"stars", f.stars(static_cast<int>(i))}});
    }
    return Json{{"coefficients", coefs}, {"nobs", f.nobs}, {"r2", f.r2}};
}

inline Json analysis_json(const AnalysisResult& a, const AnalysisOptions& opt) {
    Json nv = Json::object();
    for (const auto& [t, v] : a.net_values) {
        Json ranks = Json::array();
        for (const auto& s : v.by_rank)
            ranks.push_back(Json{{"rank", s.rank},
                                 {"count", s.count},
                                 {"mean_cents", s.count ? Json(s.mean.to_double()) : Json()},
                                 {"mean_exact", s.count ? Json(s.mean.str()) : Json()},
                                 {"sd_cents", s.sd},
                                 {"se_cents", s.se()}});
        nv[t] = ranks;
    }
    Json trend = Json::object();
    for (const auto& [t, r] : a.trend) trend[t] = r ? jt_json(*r) : Json();

    Json rates = Json::array();
    for (const auto& r : a.truth.rates)
        rates.push_back(Json{{"treatment", r.treatment},
                             {"tolerance_cents", r.tolerance.value()},
                             {"scope", std::string(to_string(r.scope))},
                             {"truthful", r.truthful},
                             {"subjects", r.subjects},
                             {"rate", r.rate()}});
    Json tests = Json::array();
    for (const auto& t : a.truth_tests)
        tests.push_back(Json{{"tolerance_cents", t.tolerance.value()},
                             {"scope", std::string(to_string(t.scope))},
                             {"rsd_vs_boston", t.test ? wilcoxon_json(*t.test) : Json()}});

    Json welfare = Json::object();
    for (const auto& tw : a.welfare.treatments)
        welfare[tw.treatment] = Json{{"groups", tw.groups},
                                     {"mean_cents", tw.groups ? Json(tw.mean.to_double()) : Json()},
                                     {"mean_exact", tw.groups ? Json(tw.mean.str()) : Json()},
                                     {"phase1_mean_cents", tw.groups ? Json(tw.phase1_mean.to_double()) : Json()}};
    welfare["rsd_vs_boston"] = a.welfare_test ? wilcoxon_json(*a.welfare_test) : Json();
    welfare["warnings"] = a.welfare.warnings;

    Json regs = Json::array();
    for (const auto& r : a.regressions) {
        Json j{{"column", r.column}, {"treatment", r.treatment}};
        if (r.fit)
            j["fit"] = ols_json(*r.fit);
        else
            j["error"] = r.error;
        regs.push_back(j);
    }
    return Json{{"subjects", a.subjects},
                {"tolerance_cents", opt.tolerance.value()},
                {"standard_errors", opt.se == SeKind::Classical ? "classical" : "hc1"},
                {"net_value", nv},
                {"jonckheere_terpstra", trend},
                {"truth_rates", rates},
                {"truth_tests", tests},
                {"welfare", welfare},
                {"regressions", regs}};
}

/// Regressor rows by column, coefficient with stars and standard error in parentheses.
inline void write_regression_table(std::ostream& out, const AnalysisResult& a, bool rank_dummies) {
    std::vector<const Regression*> cols;
    for (const auto& r : a.regressions)
        if ((r.column.rfind("D ", 0) == 0) == rank_dummies) cols.push_back(&r);
    std::vector<std::string> rows;
    for (const auto* c : cols)
        if (c->fit)
            for (const auto& n : c->fit->names)
                if (std::find(rows.begin(), rows.end(), n) == rows.end()) rows.push_back(n);
    if (const auto it = std::find(rows.begin(), rows.end(), "_cons"); it != rows.end()) {
        rows.erase(it);
        rows.push_back("_cons");
    }
    out << "regressor";
    for (const auto* c : cols) out << ',' << c->column << ' ' << c->treatment << ',' << "se";
    out << '\n';
    for (const auto& name : rows) {
        out << '"' << name << '"';
        for (const auto* c : cols) {
            out << ',';
            if (!c->fit) {
                out << ',';
                continue;
            }
            const auto& f = *c->fit;
            const auto it = std::find(f.names.begin(), f.names.end(), name);
            if (it == f.names.end()) {
                out << ',';
                continue;
            }
            const int i = static_cast<int>(it - f.names.begin());
            out << detail::fixed(f.coef(i), 4) << f.stars(i) << ','
                << (std::isfinite(f.se(i)) ? "(" + detail::fixed(f.se(i), 4) + ")" : "");
        }
        out << '\n';
    }
    out << "No. of Obs.";
    for (const auto* c : cols) out << ',' << (c->fit ? std::to_string(c->fit->nobs) : "") << ',';
    out << "\nR-Squared";
    for (const auto* c : cols) out << ',' << (c->fit ? detail::fixed(c->fit->r2, 2) : "") << ',';
    out << '\n';
}

inline void write_truth_table(std::ostream& out, const AnalysisResult& a) {
    out << "tolerance,measure,rsd,boston,all\n";
    for (Cents tol : a.tolerances)
        for (TruthScope s : {TruthScope::All, TruthScope::Top1, TruthScope::Top2}) {
            out << tol.str() << ',' << to_string(s);
            for (std::string_view t : {"rsd", "boston", "pooled"}) {
                const auto* r = a.truth.find(t, tol, s);
                out << ',' << (r && r->subjects ? detail::fixed(r->rate(), 2) : "");
            }
            out << '\n';
        }
}

inline void write_welfare_table(std::ostream& out, const AnalysisResult& a) {
    out << "rsd,boston,all\n";
    for (std::size_t i = 0; i < a.welfare.treatments.size(); ++i) {
        const auto& tw = a.welfare.treatments[i];
        if (i) out << ',';
        if (tw.groups) out << detail::fixed(tw.mean.to_double() / 100.0, 2);
    }
    out << '\n';
}

/// Per-record Net Values for external plotting.
inline void write_net_value_csv(std::ostream& out, const std::vector<SubjectRecord>& records) {
    out << "subject_id,treatment,rank,net_value\n";
    for (const auto& r : records) {
        const auto nv = net_value(r);
        out << nv.subject_id << ',' << to_string(nv.treatment) << ',' << nv.rank << ',' << nv.net_value.str() << '\n';
    }
}

}  // namespace rankdep::analysis
