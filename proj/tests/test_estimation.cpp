#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qdport/estimation.hpp"
#include "qdport/synth.hpp"

using namespace qdport;

namespace {

ReturnsWindow window_from(const MatrixXd& r) {
    ReturnsWindow w;
    w.returns = r;
    w.dates = business_days("2021-01-04", static_cast<std::size_t>(r.rows()));
    for (Eigen::Index j = 0; j < r.cols(); ++j) w.names.push_back("A" + std::to_string(j));
    return w;
}

MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index t, Eigen::Index n, double scale = 0.01) {
    std::normal_distribution<double> g(0.0, scale);
    MatrixXd m(t, n);
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(rng);
    return m;
}

double min_eigenvalue(const MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("estimates_from_moments") {
    const Estimates est = toy_estimates();
    CHECK(est.sigma(0, 1) == doctest::Approx(0.341 * 0.16603 * 0.13801).epsilon(1e-12));
    CHECK(est.sigma(0, 1) == doctest::Approx(7.815e-3).epsilon(1e-3));
    CHECK(est.mu[2] == doctest::Approx(0.08748));

    const Estimates diag = estimates_from_moments({10, 5}, {20, 30}, MatrixXd::Identity(2, 2));
    CHECK(diag.sigma(0, 0) == doctest::Approx(0.04));
    CHECK(diag.sigma(1, 1) == doctest::Approx(0.09));
    CHECK(diag.sigma(0, 1) == 0.0);

    MatrixXd bad = MatrixXd::Identity(2, 2);
    bad(0, 1) = bad(1, 0) = 1.5;
    CHECK_THROWS_AS(estimates_from_moments({1, 1}, {1, 1}, bad), DataError);

    MatrixXd not_psd(3, 3);
    not_psd << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
    CHECK_THROWS_AS(estimates_from_moments({1, 1, 1}, {1, 1, 1}, not_psd), DataError);
}

TEST_CASE("sample_estimates") {
    MatrixXd constant = MatrixXd::Constant(20, 2, 0.001);
    const Estimates c = sample_estimates(window_from(constant));
    CHECK(c.mu[0] == doctest::Approx(0.252));
    CHECK(c.sigma.cwiseAbs().maxCoeff() < 1e-20);

    std::mt19937_64 rng(1);
    MatrixXd dup = gaussian(rng, 30, 2);
    dup.col(1) = dup.col(0);
    const Estimates d = sample_estimates(window_from(dup));
    CHECK(d.sigma(0, 1) == doctest::Approx(d.sigma(0, 0)).epsilon(1e-14));
    CHECK(std::abs(min_eigenvalue(d.sigma)) < 1e-15);

    const MatrixXd r = gaussian(rng, 100, 3);
    const Estimates s = sample_estimates(window_from(r));
    const oracle::Moments m = oracle::two_pass(r);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(s.mu[i] - 252.0 * m.mean[i]) < 1e-12);
        for (int j = 0; j < 3; ++j) CHECK(std::abs(s.sigma(i, j) - 252.0 * m.cov(i, j)) < 1e-12);
    }
}

TEST_CASE("moments round trip through estimates_from_moments") {
    std::mt19937_64 rng(2);
    const Estimates s = sample_estimates(window_from(gaussian(rng, 60, 4)));
    std::vector<double> means, stds;
    MatrixXd corr(4, 4);
    for (int i = 0; i < 4; ++i) {
        means.push_back(100 * s.mu[i]);
        stds.push_back(100 * std::sqrt(s.sigma(i, i)));
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) corr(i, j) = i == j ? 1.0 : s.sigma(i, j) / std::sqrt(s.sigma(i, i) * s.sigma(j, j));
    const Estimates back = estimates_from_moments(means, stds, corr);
    CHECK((back.sigma - s.sigma).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((back.mu - s.mu).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ledoit_wolf on a covariance already at the target") {
    // Centred orthogonal columns of equal norm: S = v·I exactly.
    MatrixXd r(4, 2);
    r << 0.01, 0.01, -0.01, 0.01, 0.01, -0.01, -0.01, -0.01;
    const ReturnsWindow w = window_from(r);
    const ShrinkageResult lw = ledoit_wolf(w);
    const Estimates s = sample_estimates(w);
    CHECK((lw.covariance - s.sigma).cwiseAbs().maxCoeff() < 1e-18);
}

TEST_CASE("ledoit_wolf intensity clamps to one") {
    std::mt19937_64 rng(7);
    bool found = false;
    for (int k = 0; k < 2000 && !found; ++k) {
        const ReturnsWindow w = window_from(gaussian(rng, 4, 3, 0.05));
        const ShrinkageResult lw = ledoit_wolf(w);
        if (lw.intensity == 1.0) {
            found = true;
            const MatrixXd target = MatrixXd::Identity(3, 3) * lw.target_variance;
            CHECK(lw.covariance == target);
        }
    }
    CHECK(found);
}

TEST_CASE("ledoit_wolf output on a random window") {
    std::mt19937_64 rng(9);
    const ReturnsWindow w = window_from(gaussian(rng, 50, 5));
    const ShrinkageResult lw = ledoit_wolf(w);
    const Estimates s = sample_estimates(w);
    CHECK(lw.intensity >= 0.0);
    CHECK(lw.intensity <= 1.0);
    CHECK(min_eigenvalue(lw.covariance) >= -1e-12);
    const double lo = std::min(s.sigma.diagonal().minCoeff(), lw.target_variance);
    const double hi = std::max(s.sigma.diagonal().maxCoeff(), lw.target_variance);
    for (int i = 0; i < 5; ++i) {
        CHECK(lw.covariance(i, i) >= lo - 1e-15);
        CHECK(lw.covariance(i, i) <= hi + 1e-15);
    }
    CHECK_THROWS_AS(ledoit_wolf(window_from(MatrixXd::Zero(1, 3))), DataError);
}

TEST_CASE("capm expected returns") {
    std::mt19937_64 rng(4);
    const MatrixXd base = gaussian(rng, 200, 1);
    const VectorXd market = base.col(0).array() + 0.0004;
    const double rf = 0.02;
    const double mu_m = 252.0 * market.mean();

    MatrixXd r(200, 3);
    r.col(0) = market;
    r.col(1) = 2.0 * market;
    // Orthogonal to the centred market: (x - proj) has zero sample covariance.
    VectorXd noise = gaussian(rng, 200, 1).col(0);
    const VectorXd mc = market.array() - market.mean();
    const VectorXd nc = noise.array() - noise.mean();
    r.col(2) = (nc - mc * (mc.dot(nc) / mc.squaredNorm())).array() + 0.001;

    const VectorXd mu = capm_expected_returns(window_from(r), market, rf);
    CHECK(mu[0] == doctest::Approx(mu_m).epsilon(1e-12));
    CHECK(mu[1] == doctest::Approx(rf + 2.0 * (mu_m - rf)).epsilon(1e-12));
    CHECK(mu[2] == doctest::Approx(rf).epsilon(1e-9));

    CHECK_THROWS_AS(capm_expected_returns(window_from(r), VectorXd::Constant(200, 0.001), rf), NumericalError);
    CHECK_THROWS_AS(capm_expected_returns(window_from(r), market.head(10), rf), DataError);
}

TEST_CASE("market proxies") {
    MatrixXd r(3, 2);
    r << 0.01, 0.03, 0.02, 0.00, -0.01, 0.01;
    const ReturnsWindow w = window_from(r);
    const VectorXd eq = market_series(w, MarketProxy::equal_weight);
    CHECK(eq[0] == doctest::Approx(0.02));
    const VectorXd cw = market_series(w, MarketProxy::cap_weight, {3.0, 1.0});
    CHECK(cw[0] == doctest::Approx(0.015));
    CHECK_THROWS_AS(market_series(w, MarketProxy::cap_weight), DataError);
}

TEST_CASE("returns windows") {
    std::mt19937_64 rng(6);
    ReturnsWindow w = window_from(gaussian(rng, 10, 2));
    CHECK_NOTHROW(w.validate());
    const ReturnsWindow t = w.trailing(4);
    CHECK(t.days() == 4);
    CHECK(t.dates.front() == w.dates[6]);
    CHECK(t.returns(0, 1) == w.returns(6, 1));
    CHECK_THROWS_AS(w.trailing(11), DataError);

    ReturnsWindow bad = w;
    std::swap(bad.dates[2], bad.dates[3]);
    CHECK_THROWS_AS(bad.validate(), DataError);
    bad = w;
    bad.returns(1, 1) = std::nan("");
    CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("estimate combines the configured estimators") {
    SynthParams p;
    p.assets = 8;
    p.sectors = 2;
    p.days = 300;
    const SyntheticMarket m = generate_synthetic_universe(p);
    EstimatorSettings s;
    const Estimates est = estimate(m.window, s);
    CHECK(est.size() == 8);
    CHECK_NOTHROW(est.validate());
    CHECK((est.sigma - ledoit_wolf_cov(m.window)).cwiseAbs().maxCoeff() == 0.0);
    const VectorXd capm = capm_expected_returns(m.window, market_series(m.window, MarketProxy::equal_weight), 0.0);
    CHECK((est.mu - capm).cwiseAbs().maxCoeff() == 0.0);

    s.covariance = CovarianceMethod::sample;
    s.mean = MeanMethod::sample;
    const Estimates plain = estimate(m.window, s);
    CHECK((plain.mu - sample_estimates(m.window).mu).cwiseAbs().maxCoeff() == 0.0);

    s.mean = MeanMethod::capm;
    s.external_market = m.market;
    const Estimates ext = estimate(m.window.trailing(100), s);
    const VectorXd ext_mu = capm_expected_returns(m.window.trailing(100), m.market.tail(100), 0.0);
    CHECK((ext.mu - ext_mu).cwiseAbs().maxCoeff() == 0.0);
}
