#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qdport {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Bad input: malformed data, violated preconditions, dimension mismatches.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a certified answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kSimplexTolerance = 1e-9;
inline constexpr double kRenormalizeTolerance = 1e-6;

/// Long-only, fully invested weight vector.
///
/// Construction renormalizes when the weights sum to within 1e-6 of one and
/// rejects anything further off, or any negative entry.
class Portfolio {
public:
    Portfolio() = default;
    explicit Portfolio(std::vector<double> weights);

    static Portfolio equal_weight(std::size_t n);
    static Portfolio unit(std::size_t n, std::size_t asset);

    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] const std::vector<double>& vec() const noexcept { return weights_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return weights_[i]; }

    bool operator==(const Portfolio&) const = default;

private:
    std::vector<double> weights_;
};

/// True when every weight is non-negative and the sum is within tol of one.
bool on_simplex(std::span<const double> w, double tol = kSimplexTolerance);

struct AssetUniverse {
    std::vector<std::string> names;
    std::vector<int> sector_of;
    std::vector<double> market_cap;
    int sectors = 0;

    [[nodiscard]] std::size_t size() const noexcept { return names.size(); }
    void validate() const;
    [[nodiscard]] double max_cap() const;
};

/// Annualized expected returns and return covariance, decimal units.
struct Estimates {
    std::vector<std::string> names;
    VectorXd mu;
    MatrixXd sigma;

    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(mu.size()); }
    /// Checks shape, symmetry (1e-10) and PSD (min eigenvalue >= -1e-8).
    void validate() const;
};

struct RiskReturnPoint {
    double mu = 0.0;
    double sigma = 0.0;
};

RiskReturnPoint risk_return(std::span<const double> w, const Estimates& est);
inline RiskReturnPoint risk_return(const Portfolio& w, const Estimates& est) {
    return risk_return(w.weights(), est);
}

/// (mu - rf) / sigma. Throws NumericalError for zero volatility.
double sharpe(const RiskReturnPoint& rr, double rf);
double sharpe(const Portfolio& w, const Estimates& est, double rf);

}  // namespace qdport
