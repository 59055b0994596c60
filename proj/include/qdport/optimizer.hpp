#pragma once

#include <vector>

#include "qdport/core.hpp"

namespace qdport {

inline constexpr double kDefaultGapTolerance = 1e-9;
inline constexpr int kMaxSolverIterations = 50'000;

struct MvSolution {
    Portfolio w;
    double objective = 0.0;  // wᵀμ - γ wᵀΣw
    double gap = 0.0;        // Frank-Wolfe duality gap at exit
    int iterations = 0;
};

/// Long-only maximizer of wᵀμ - γ wᵀΣw by Frank-Wolfe with away steps.
/// Throws NumericalError carrying the last gap if the cap is reached.
MvSolution solve_mv_detailed(double gamma, const Estimates& est, double tol = kDefaultGapTolerance);
inline Portfolio solve_mv(double gamma, const Estimates& est, double tol = kDefaultGapTolerance) {
    return solve_mv_detailed(gamma, est, tol).w;
}

/// Tangency portfolio. Uses the ratio transform when every asset beats rf,
/// otherwise a γ scan refined by golden-section search.
Portfolio max_sharpe(const Estimates& est, double rf, double tol = kDefaultGapTolerance);

/// Same scan max_sharpe falls back to; exposed for testing.
Portfolio max_sharpe_by_scan(const Estimates& est, double rf, double tol = kDefaultGapTolerance);

struct FrontierPoint {
    Portfolio w;
    RiskReturnPoint rr;
    double gamma = 0.0;
};

inline constexpr double kFrontierGammaMin = 1e-3;
inline constexpr double kFrontierGammaMax = 1e4;

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Frontier over a log γ grid, sorted by σ, dominated points removed.
std::vector<FrontierPoint> efficient_frontier(const Estimates& est, std::size_t n_points);

struct GammaFit {
    double gamma = 0.0;
    Portfolio w;
    double max_abs_error = 0.0;
};

/// Risk aversion whose optimum is closest (L∞) to `target`.
GammaFit fit_gamma(const Estimates& est, const Portfolio& target, double lo = kFrontierGammaMin,
                   double hi = kFrontierGammaMax);

}  // namespace qdport

namespace qdport {

/// How the reference (w0) portfolio is chosen from a set of estimates.
struct ReferenceRule {
    enum class Kind { weights, gamma, max_sharpe };
    Kind kind = Kind::max_sharpe;
    Portfolio weights;  // Kind::weights
    double gamma = 0.0;  // Kind::gamma
    double rf = 0.0;     // Kind::max_sharpe

    static ReferenceRule fixed(Portfolio w) { return {Kind::weights, std::move(w), 0.0, 0.0}; }
    static ReferenceRule risk_aversion(double g) { return {Kind::gamma, {}, g, 0.0}; }
    static ReferenceRule tangency(double rf) { return {Kind::max_sharpe, {}, 0.0, rf}; }

    [[nodiscard]] Portfolio resolve(const Estimates& est) const;
};

}  // namespace qdport
