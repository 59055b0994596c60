#include "qdport/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qdport {
namespace {

MatrixXd centered(const MatrixXd& x) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    return x.rowwise() - mean;
}

void require_rows(const ReturnsWindow& win, const char* what) {
    if (win.days() < 2)
        throw DataError(std::string(what) + ": need T >= 2, got T=" + std::to_string(win.days()));
    if (win.assets() < 1) throw DataError(std::string(what) + ": window has no assets");
}

}  // namespace

void ReturnsWindow::validate() const {
    if (returns.rows() < 2 || returns.cols() < 2)
        throw DataError("returns window: need T >= 2 and N >= 2");
    if (!dates.empty() && static_cast<Eigen::Index>(dates.size()) != returns.rows())
        throw DataError("returns window: date count does not match rows");
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != returns.cols())
        throw DataError("returns window: name count does not match columns");
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i]))
            throw DataError("returns window: dates not strictly increasing at " + dates[i]);
    }
    if (!returns.allFinite()) throw DataError("returns window: missing or non-finite entries");
}

ReturnsWindow ReturnsWindow::trailing(Eigen::Index t) const {
    if (t > days()) {
        throw DataError("window of " + std::to_string(t) + " days exceeds available history of " +
                        std::to_string(days()));
    }
    ReturnsWindow out;
    out.names = names;
    if (!dates.empty()) out.dates.assign(dates.end() - t, dates.end());
    out.returns = returns.bottomRows(t);
    return out;
}

Estimates estimates_from_moments(const std::vector<double>& means_pct,
                                 const std::vector<double>& stds_pct, const MatrixXd& corr,
                                 std::vector<std::string> names) {
    const auto n = static_cast<Eigen::Index>(means_pct.size());
    if (static_cast<Eigen::Index>(stds_pct.size()) != n || corr.rows() != n || corr.cols() != n)
        throw DataError("estimates_from_moments: inconsistent dimensions");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(corr(i, i) - 1.0) > 1e-12) throw DataError("estimates_from_moments: diagonal must be 1");
        if (!(stds_pct[i] >= 0.0)) throw DataError("estimates_from_moments: negative std");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(corr(i, j) >= -1.0 && corr(i, j) <= 1.0))
                throw DataError("estimates_from_moments: correlation outside [-1, 1]");
            if (std::abs(corr(i, j) - corr(j, i)) > 1e-12)
                throw DataError("estimates_from_moments: correlation not symmetric");
        }
    }
    Estimates est;
    est.names = std::move(names);
    est.mu.resize(n);
    est.sigma.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        est.mu(i) = means_pct[i] / 100.0;
        for (Eigen::Index j = 0; j < n; ++j)
            est.sigma(i, j) = corr(i, j) * stds_pct[i] * stds_pct[j] / 1e4;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(est.sigma, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < -1e-8)
        throw DataError("estimates_from_moments: covariance not PSD, eigenvalue " + std::to_string(lo));
    est.validate();
    return est;
}

Estimates toy_estimates() {
    MatrixXd corr(3, 3);
    corr << 1.000, 0.341, -0.081,  //
        0.341, 1.000, 0.050,       //
        -0.081, 0.050, 1.000;
    return estimates_from_moments({15.876, 12.324, 8.748}, {16.603, 13.801, 0.759}, corr,
                                  {"stocks", "bonds", "tbills"});
}

Portfolio toy_reference_portfolio() { return Portfolio({0.581, 0.228, 0.191}); }

Estimates sample_estimates(const ReturnsWindow& win, int trading_days_per_year) {
    require_rows(win, "sample_estimates");
    const double scale = trading_days_per_year;
    const MatrixXd x = centered(win.returns);
    Estimates est;
    est.names = win.names;
    est.mu = win.returns.colwise().mean().transpose() * scale;
    est.sigma = (x.transpose() * x) / static_cast<double>(win.days() - 1) * scale;
    est.sigma = 0.5 * (est.sigma + est.sigma.transpose()).eval();
    return est;
}

ShrinkageResult ledoit_wolf(const ReturnsWindow& win, int trading_days_per_year) {
    require_rows(win, "ledoit_wolf_cov");
    const auto t = static_cast<double>(win.days());
    const auto n = win.assets();
    const MatrixXd x = centered(win.returns);
    MatrixXd s = (x.transpose() * x) / (t - 1.0);
    s = 0.5 * (s + s.transpose()).eval();
    const double vbar = s.trace() / static_cast<double>(n);

    // Inner products are normalized by N: <A, B> = tr(A Bᵀ) / N.
    MatrixXd dev = s;
    dev.diagonal().array() -= vbar;
    const double d2 = dev.squaredNorm() / static_cast<double>(n);

    // b̄² = (1/T²) Σ_t ||x_t x_tᵀ - S||², expanded to avoid forming the outer products.
    const double s_norm2 = s.squaredNorm();
    double acc = 0.0;
    for (Eigen::Index r = 0; r < win.days(); ++r) {
        const VectorXd xt = x.row(r).transpose();
        const double xx = xt.squaredNorm();
        acc += xx * xx - 2.0 * xt.dot(s * xt) + s_norm2;
    }
    const double b2_bar = std::max(0.0, acc) / (t * t) / static_cast<double>(n);

    double delta = 0.0;
    if (d2 > 0.0) delta = std::min(b2_bar, d2) / d2;
    delta = std::clamp(delta, 0.0, 1.0);

    ShrinkageResult out;
    out.intensity = delta;
    const double scale = trading_days_per_year;
    if (delta == 1.0) {
        out.covariance = MatrixXd::Identity(n, n) * (vbar * scale);
    } else {
        out.covariance = (1.0 - delta) * s;
        out.covariance.diagonal().array() += delta * vbar;
        out.covariance *= scale;
    }
    out.target_variance = vbar * scale;
    return out;
}

VectorXd capm_expected_returns(const ReturnsWindow& win, const VectorXd& market, double rf,
                               int trading_days_per_year) {
    require_rows(win, "capm_expected_returns");
    if (market.size() != win.days())
        throw DataError("capm_expected_returns: market series length does not match window");
    const VectorXd m = market.array() - market.mean();
    const double var_m = m.squaredNorm();
    if (!(var_m > 1e-12 * market.squaredNorm())) throw NumericalError("capm_expected_returns: market series has zero variance");
    const MatrixXd x = centered(win.returns);
    const VectorXd beta = (x.transpose() * m) / var_m;
    const double market_annual = market.mean() * trading_days_per_year;
    return (rf + beta.array() * (market_annual - rf)).matrix();
}

VectorXd market_series(const ReturnsWindow& win, MarketProxy proxy,
                       const std::vector<double>& market_caps) {
    if (proxy == MarketProxy::equal_weight) return win.returns.rowwise().mean();
    if (static_cast<Eigen::Index>(market_caps.size()) != win.assets())
        throw DataError("market_series: cap-weighted proxy needs one market cap per asset");
    VectorXd caps = Eigen::Map<const VectorXd>(market_caps.data(), win.assets());
    caps /= caps.sum();
    return win.returns * caps;
}

Estimates estimate(const ReturnsWindow& win, const EstimatorSettings& settings,
                   const std::vector<double>& market_caps) {
    Estimates est = sample_estimates(win, settings.trading_days_per_year);
    if (settings.covariance == CovarianceMethod::ledoit_wolf)
        est.sigma = ledoit_wolf(win, settings.trading_days_per_year).covariance;
    if (settings.mean == MeanMethod::capm) {
        VectorXd market;
        if (settings.external_market) {
            const VectorXd& ext = *settings.external_market;
            if (ext.size() < win.days())
                throw DataError("estimate: external market series shorter than the window");
            market = ext.tail(win.days());
        } else {
            market = market_series(win, settings.proxy, market_caps);
        }
        est.mu = capm_expected_returns(win, market, settings.rf, settings.trading_days_per_year);
    }
    return est;
}

}  // namespace qdport
