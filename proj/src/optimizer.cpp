#include "qdport/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qdport {
namespace {

struct QpResult {
    VectorXd z;
    double gap = 0.0;
    int iterations = 0;
};

// Minimizes -linᵀz + γ zᵀQz over the unit simplex with away-step Frank-Wolfe.
QpResult simplex_qp(const VectorXd& lin, const MatrixXd& q, double gamma, double tol) {
    const Eigen::Index n = lin.size();
    // Start at the best vertex.
    Eigen::Index start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = -lin(i) + gamma * q(i, i);
        if (f < best) {
            best = f;
            start = i;
        }
    }
    VectorXd z = VectorXd::Zero(n);
    z(start) = 1.0;
    VectorXd qz = q.col(start);
    VectorXd qd(n);

    double gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < kMaxSolverIterations; ++it) {
        if (it > 0 && it % 256 == 0) qz.noalias() = q * z;
        const VectorXd g = -lin + 2.0 * gamma * qz;
        const double gz = g.dot(z);

        Eigen::Index s = 0;
        g.minCoeff(&s);
        gap = gz - g(s);
        if (gap <= tol) break;

        Eigen::Index v = -1;
        double gv = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (z(i) > 0.0 && g(i) > gv) {
                gv = g(i);
                v = i;
            }
        }
        const double away_gap = gv - gz;

        double slope = 0.0;
        double tmax = 1.0;
        bool away = false;
        if (gap >= away_gap || v < 0) {
            qd = q.col(s) - qz;  // d = e_s - z
            slope = -gap;
        } else {
            away = true;
            qd = qz - q.col(v);  // d = z - e_v
            slope = -away_gap;
            tmax = z(v) / (1.0 - z(v));
        }
        double dqd = 0.0;
        if (away) {
            dqd = z.dot(qd) - qd(v);
        } else {
            dqd = qd(s) - z.dot(qd);
        }
        const double curvature = gamma * dqd;
        double step = tmax;
        if (curvature > 0.0) step = std::min(tmax, -slope / (2.0 * curvature));
        if (!(step > 0.0)) {
            // Rounding left no descent along d; the gap is as small as it will get.
            break;
        }

        if (away) {
            z *= (1.0 + step);
            z(v) -= step;
            if (step == tmax) z(v) = 0.0;
        } else {
            z *= (1.0 - step);
            z(s) += step;
        }
        qz += step * qd;
    }
    if (gap > tol) {
        throw NumericalError("solve_mv: Frank-Wolfe did not converge after " + std::to_string(it) +
                             " iterations (gap " + std::to_string(gap) + ")");
    }
    z = z.cwiseMax(0.0);
    z /= z.sum();
    return {std::move(z), gap, it};
}

Portfolio to_portfolio(const VectorXd& z) {
    return Portfolio(std::vector<double>(z.data(), z.data() + z.size()));
}

double golden_max(double lo, double hi, int iters, auto&& f) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters; ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? c : d;
}

}  // namespace

MvSolution solve_mv_detailed(double gamma, const Estimates& est, double tol) {
    if (!(gamma >= 0.0)) throw DataError("solve_mv: gamma must be >= 0");
    if (!(tol > 0.0)) throw DataError("solve_mv: tolerance must be positive");
    if (est.size() < 1) throw DataError("solve_mv: empty estimates");
    QpResult r = simplex_qp(est.mu, est.sigma, gamma, tol);
    MvSolution out;
    out.objective = r.z.dot(est.mu) - gamma * r.z.dot(est.sigma * r.z);
    out.gap = r.gap;
    out.iterations = r.iterations;
    out.w = to_portfolio(r.z);
    return out;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw DataError("log_grid: need n >= 2 and 0 < lo < hi");
    std::vector<double> g(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

Portfolio max_sharpe_by_scan(const Estimates& est, double rf, double tol) {
    const std::size_t n = est.size();
    auto score = [&](const Portfolio& w) {
        const RiskReturnPoint rr = risk_return(w, est);
        if (!(rr.sigma > 0.0)) return rr.mu > rf ? std::numeric_limits<double>::infinity()
                                                 : -std::numeric_limits<double>::infinity();
        return (rr.mu - rf) / rr.sigma;
    };
    Portfolio best_w;
    double best = -std::numeric_limits<double>::infinity();
    double best_log_gamma = 0.0;
    auto consider = [&](Portfolio w, double log_gamma) {
        const double s = score(w);
        if (s > best) {
            best = s;
            best_w = std::move(w);
            best_log_gamma = log_gamma;
        }
    };
    for (std::size_t i = 0; i < n; ++i) consider(Portfolio::unit(n, i), std::nan(""));
    const auto grid = log_grid(kFrontierGammaMin, kFrontierGammaMax * 100.0, 200);
    for (double g : grid) consider(solve_mv(g, est, tol), std::log(g));
    if (!std::isnan(best_log_gamma)) {
        const double step = (std::log(grid.back()) - std::log(grid.front())) / 199.0;
        auto f = [&](double lg) { return score(solve_mv(std::exp(lg), est, tol)); };
        const double lg = golden_max(best_log_gamma - step, best_log_gamma + step, 60, f);
        consider(solve_mv(std::exp(lg), est, tol), lg);
    }
    return best_w;
}

Portfolio max_sharpe(const Estimates& est, double rf, double tol) {
    const VectorXd excess = est.mu.array() - rf;
    if (!(excess.maxCoeff() > 0.0))
        throw DataError("max_sharpe: no asset has expected return above the risk-free rate");
    if (excess.minCoeff() <= 0.0) return max_sharpe_by_scan(est, rf, tol);

    // y = z / excess maps the simplex onto {y >= 0, yᵀ(μ - rf) = 1}.
    const VectorXd inv = excess.cwiseInverse();
    const MatrixXd q = inv.asDiagonal() * est.sigma * inv.asDiagonal();
    const double scale = q.diagonal().maxCoeff();
    if (!(scale > 0.0)) {
        Eigen::Index best = 0;
        excess.maxCoeff(&best);
        return Portfolio::unit(est.size(), static_cast<std::size_t>(best));
    }
    QpResult r = simplex_qp(VectorXd::Zero(excess.size()), q / scale, 1.0, tol);
    VectorXd y = r.z.cwiseProduct(inv);
    y /= y.sum();
    return to_portfolio(y);
}

std::vector<FrontierPoint> efficient_frontier(const Estimates& est, std::size_t n_points) {
    if (n_points < 2) throw DataError("efficient_frontier: need at least 2 points");
    std::vector<FrontierPoint> pts;
    pts.reserve(n_points);
    for (double g : log_grid(kFrontierGammaMin, kFrontierGammaMax, n_points)) {
        Portfolio w = solve_mv(g, est);
        const RiskReturnPoint rr = risk_return(w, est);
        pts.push_back({std::move(w), rr, g});
    }
    std::stable_sort(pts.begin(), pts.end(),
                     [](const FrontierPoint& a, const FrontierPoint& b) { return a.rr.sigma < b.rr.sigma; });
    std::vector<FrontierPoint> kept;
    for (auto& p : pts) {
        if (kept.empty() || p.rr.mu >= kept.back().rr.mu) kept.push_back(std::move(p));
    }
    return kept;
}

GammaFit fit_gamma(const Estimates& est, const Portfolio& target, double lo, double hi) {
    if (target.size() != est.size()) throw DataError("fit_gamma: target dimension mismatch");
    auto error = [&](const Portfolio& w) {
        double e = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) e = std::max(e, std::abs(w[i] - target[i]));
        return e;
    };
    GammaFit best;
    best.max_abs_error = std::numeric_limits<double>::infinity();
    const auto grid = log_grid(lo, hi, 400);
    for (double g : grid) {
        Portfolio w = solve_mv(g, est);
        const double e = error(w);
        if (e < best.max_abs_error) best = {g, std::move(w), e};
    }
    const double step = (std::log(hi) - std::log(lo)) / 399.0;
    const double centre = std::log(best.gamma);
    auto f = [&](double lg) { return -error(solve_mv(std::exp(lg), est)); };
    const double lg = golden_max(centre - step, centre + step, 60, f);
    Portfolio w = solve_mv(std::exp(lg), est);
    if (const double e = error(w); e < best.max_abs_error) best = {std::exp(lg), std::move(w), e};
    return best;
}

}  // namespace qdport

namespace qdport {

Portfolio ReferenceRule::resolve(const Estimates& est) const {
    switch (kind) {
        case Kind::weights:
            if (weights.size() != est.size()) throw DataError("reference weights dimension mismatch");
            return weights;
        case Kind::gamma:
            return solve_mv(gamma, est);
        case Kind::max_sharpe:
            return max_sharpe(est, rf);
    }
    throw DataError("unknown reference rule");
}

}  // namespace qdport
