#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdport/core.hpp"

namespace qdport {

inline constexpr int kTradingDaysPerYear = 252;

/// T×N simple daily returns with strictly increasing ISO dates.
struct ReturnsWindow {
    std::vector<std::string> dates;
    std::vector<std::string> names;
    MatrixXd returns;

    [[nodiscard]] Eigen::Index days() const noexcept { return returns.rows(); }
    [[nodiscard]] Eigen::Index assets() const noexcept { return returns.cols(); }
    void validate() const;
    /// The last `t` rows.
    [[nodiscard]] ReturnsWindow trailing(Eigen::Index t) const;
};

/// Builds estimates from annual moments given in percent (Table-style input).
/// Throws DataError for a malformed correlation matrix or a non-PSD result.
Estimates estimates_from_moments(const std::vector<double>& means_pct,
                                 const std::vector<double>& stds_pct, const MatrixXd& corr,
                                 std::vector<std::string> names = {});

/// Stocks / bonds / T-bills toy market (annual).
Estimates toy_estimates();
/// Moderate-risk-aversion optimum reported for the toy market.
Portfolio toy_reference_portfolio();

/// Annualized sample mean and covariance (denominator T-1).
Estimates sample_estimates(const ReturnsWindow& win, int trading_days_per_year = kTradingDaysPerYear);

struct ShrinkageResult {
    MatrixXd covariance;  // annualized
    double intensity = 0.0;
    double target_variance = 0.0;  // annualized mean sample variance
};

/// Ledoit-Wolf shrinkage of the sample covariance towards mean-variance × I.
ShrinkageResult ledoit_wolf(const ReturnsWindow& win, int trading_days_per_year = kTradingDaysPerYear);
inline MatrixXd ledoit_wolf_cov(const ReturnsWindow& win,
                                int trading_days_per_year = kTradingDaysPerYear) {
    return ledoit_wolf(win, trading_days_per_year).covariance;
}

/// Per-asset CAPM expected annual return: rf + beta_i (E[r_m] - rf).
VectorXd capm_expected_returns(const ReturnsWindow& win, const VectorXd& market, double rf,
                               int trading_days_per_year = kTradingDaysPerYear);

enum class MarketProxy { equal_weight, cap_weight };

VectorXd market_series(const ReturnsWindow& win, MarketProxy proxy,
                       const std::vector<double>& market_caps = {});

enum class CovarianceMethod { sample, ledoit_wolf };
enum class MeanMethod { sample, capm };

struct EstimatorSettings {
    CovarianceMethod covariance = CovarianceMethod::ledoit_wolf;
    MeanMethod mean = MeanMethod::capm;
    MarketProxy proxy = MarketProxy::equal_weight;
    std::optional<VectorXd> external_market;  // full-history series, aligned with the window
    double rf = 0.0;
    int trading_days_per_year = kTradingDaysPerYear;
};

/// Runs the configured mean and covariance estimators on a window.
/// An external market series is aligned on the window's trailing rows.
Estimates estimate(const ReturnsWindow& win, const EstimatorSettings& settings,
                   const std::vector<double>& market_caps = {});

}  // namespace qdport
