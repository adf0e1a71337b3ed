#pragma once
// Ordinary least squares via column-pivoted Householder QR, with classical or
// HC1 standard errors and two-sided Student-t p-values.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "rankdep/analysis/measures.hpp"
#include "rankdep/analysis/session.hpp"
#include "rankdep/errors.hpp"

namespace rankdep::analysis {

enum class SeKind { Classical, HC1 };

struct OlsResult {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd t;
    Eigen::VectorXd p;
    Eigen::VectorXd residuals;
    double r2 = 0.0;
    int nobs = 0;
    int df_resid = 0;

    /// "*" p < 0.1, "**" p < 0.05, "***" p < 0.01.
    std::string stars(int i) const {
        const double pv = p(i);
        if (!(pv < 0.1)) return "";
        return pv < 0.01 ? "***" : pv < 0.05 ? "**" : "*";
    }
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        throw ArgumentError("no regressor named " + name);
    }
};

inline OlsResult ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, std::vector<std::string> names,
                         SeKind se_kind = SeKind::Classical) {
    const auto n = X.rows(), k = X.cols();
    if (static_cast<Eigen::Index>(names.size()) != k) throw ArgumentError("one name per column required");
    if (y.size() != n) throw ArgumentError("y and X have different row counts");
    if (n < k) throw ArgumentError("fewer observations than regressors");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
        // Name the first column that adds nothing to the span of those before it.
        for (Eigen::Index j = 0; j < k; ++j) {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> part(X.leftCols(j + 1));
            part.setThreshold(qr.threshold());
            if (part.rank() < j + 1) throw ArgumentError("design is rank deficient: column '" + names[j] +
                                                         "' is collinear with earlier columns");
        }
        throw ArgumentError("design is rank deficient");
    }

    OlsResult r;
    r.names = std::move(names);
    r.nobs = static_cast<int>(n);
    r.df_resid = static_cast<int>(n - k);
    r.coef = qr.solve(y);
    r.residuals = y - X * r.coef;

    const double rss = r.residuals.squaredNorm();
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    r.r2 = tss > 0 ? 1.0 - rss / tss : (rss <= 1e-24 ? 1.0 : 0.0);

    // (X'X)^-1 = P R^-1 R^-T P'
    const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.template triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const auto& P = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = P * (Rinv * Rinv.transpose()) * P.transpose();

    Eigen::MatrixXd cov;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (r.df_resid == 0) {
        cov = Eigen::MatrixXd::Constant(k, k, nan);
    } else if (se_kind == SeKind::Classical) {
        cov = xtx_inv * (rss / r.df_resid);
    } else {
        const Eigen::MatrixXd meat = X.transpose() * r.residuals.array().square().matrix().asDiagonal() * X;
        cov = xtx_inv * meat * xtx_inv * (static_cast<double>(n) / r.df_resid);
    }
    r.se = cov.diagonal().cwiseSqrt();
    r.t = r.coef.cwiseQuotient(r.se);
    r.p.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        if (r.df_resid == 0 || !std::isfinite(r.t(i))) {
            r.p(i) = r.se(i) == 0.0 ? 0.0 : nan;
            continue;
        }
        const boost::math::students_t dist(r.df_resid);
        r.p(i) = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t(i))));
    }
    return r;
}

struct Design {
    std::vector<std::string> names;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

/// Net Value (dollars) on received rank; with controls adds initial value,
/// risk and loss aversion rows, CRT, female, Phase I order, practice and the
/// ranked-above-implied dummy. Intercept last, named "_cons".
inline Design net_value_design(const std::vector<SubjectRecord>& records, bool controls) {
    Design d;
    d.names = {"rank"};
    if (controls)
        d.names.insert(d.names.end(), {"initial value", "risk aversion", "loss aversion", "CRT score", "female",
                                       "Phase I order", "practice", "truthful"});
    d.names.push_back("_cons");
    const auto n = static_cast<Eigen::Index>(records.size());
    d.X.resize(n, static_cast<Eigen::Index>(d.names.size()));
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[i];
        d.y(i) = net_value(r).net_value.dollars();
        Eigen::Index c = 0;
        d.X(i, c++) = r.rank_received();
        if (controls) {
            d.X(i, c++) = r.phase1_value[r.good_received].dollars();
            d.X(i, c++) = r.risk_row;
            d.X(i, c++) = r.loss_row;
            d.X(i, c++) = r.crt;
            d.X(i, c++) = r.female;
            d.X(i, c++) = r.phase1_order;
            d.X(i, c++) = r.practice;
            d.X(i, c++) = ranked_above_implied(r) ? 1.0 : 0.0;
        }
        d.X(i, c++) = 1.0;
    }
    return d;
}

/// Net Value on rank dummies (rank 1 omitted), good dummies (mug omitted),
/// initial value and risk aversion.
inline Design rank_dummy_design(const std::vector<SubjectRecord>& records) {
    Design d;
    d.names = {"2nd rank", "3rd rank", "4th rank", "5th rank", "backpack", "notebook", "waterbottle",
               "pens",     "initial value", "risk aversion", "_cons"};
    constexpr GoodId kBackpack = 0, kBottle = 1, kNotebook = 2, kPens = 4;
    const auto n = static_cast<Eigen::Index>(records.size());
    d.X = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d.names.size()));
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = records[i];
        d.y(i) = net_value(r).net_value.dollars();
        const int rank = r.rank_received();
        if (rank >= 2) d.X(i, rank - 2) = 1.0;
        const GoodId g = r.good_received;
        d.X(i, 4) = g == kBackpack;
        d.X(i, 5) = g == kNotebook;
        d.X(i, 6) = g == kBottle;
        d.X(i, 7) = g == kPens;
        d.X(i, 8) = r.phase1_value[g].dollars();
        d.X(i, 9) = r.risk_row;
        d.X(i, 10) = 1.0;
    }
    return d;
}

}  // namespace rankdep::analysis
