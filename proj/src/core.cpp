#include "qdport/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qdport/kernels.hpp"

namespace qdport {

Portfolio::Portfolio(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw DataError("portfolio: empty weight vector");
    double sum = 0.0;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0)
            throw DataError("portfolio: weights must be finite and non-negative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > kRenormalizeTolerance)
        throw DataError("portfolio: weights sum to " + std::to_string(sum) + ", expected 1");
    if (sum != 1.0) {
        for (double& w : weights_) w /= sum;
    }
}

Portfolio Portfolio::equal_weight(std::size_t n) {
    return Portfolio(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Portfolio Portfolio::unit(std::size_t n, std::size_t asset) {
    std::vector<double> w(n, 0.0);
    w.at(asset) = 1.0;
    return Portfolio(std::move(w));
}

bool on_simplex(std::span<const double> w, double tol) {
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) return false;
        sum += x;
    }
    return std::abs(sum - 1.0) <= tol;
}

void AssetUniverse::validate() const {
    const std::size_t n = names.size();
    if (n < 2) throw DataError("universe: need at least 2 assets");
    if (sector_of.size() != n || market_cap.size() != n)
        throw DataError("universe: names, sectors and market caps differ in length");
    if (sectors < 1) throw DataError("universe: sector count must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        if (sector_of[i] < 0 || sector_of[i] >= sectors)
            throw DataError("universe: sector index out of range for " + names[i]);
        if (!(market_cap[i] > 0.0)) throw DataError("universe: non-positive market cap for " + names[i]);
    }
}

double AssetUniverse::max_cap() const {
    return *std::max_element(market_cap.begin(), market_cap.end());
}

void Estimates::validate() const {
    const auto n = mu.size();
    if (n < 2) throw DataError("estimates: need at least 2 assets");
    if (sigma.rows() != n || sigma.cols() != n)
        throw DataError("estimates: covariance shape does not match mean vector");
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != n)
        throw DataError("estimates: name count does not match mean vector");
    if (!mu.allFinite() || !sigma.allFinite()) throw DataError("estimates: non-finite entries");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw DataError("estimates: covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < -1e-8)
        throw DataError("estimates: covariance is not PSD (eigenvalue " + std::to_string(lo) + ")");
}

RiskReturnPoint risk_return(std::span<const double> w, const Estimates& est) {
    const std::size_t n = est.size();
    if (w.size() != n)
        throw DataError("risk_return: portfolio has " + std::to_string(w.size()) +
                        " weights, estimates have " + std::to_string(n));
    const double mu = kernels::dot(w.data(), est.mu.data(), n);
    double var = kernels::quad_form(est.sigma.data(), w.data(), n);
    if (var < 0.0) {
        if (var < -1e-12) throw NumericalError("risk_return: negative portfolio variance");
        var = 0.0;
    }
    return {mu, std::sqrt(var)};
}

double sharpe(const RiskReturnPoint& rr, double rf) {
    if (!(rr.sigma > 0.0)) throw NumericalError("sharpe: zero-volatility portfolio, ratio undefined");
    return (rr.mu - rf) / rr.sigma;
}

double sharpe(const Portfolio& w, const Estimates& est, double rf) {
    return sharpe(risk_return(w, est), rf);
}

}  // namespace qdport
