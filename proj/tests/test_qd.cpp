#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qdport/estimation.hpp"
#include "qdport/io.hpp"
#include "qdport/qd.hpp"

using namespace qdport;

namespace {

QdConfig small_config() {
    QdConfig cfg;
    cfg.niches = 50;
    cfg.n_max = 20000;
    cfg.n_cvt = 2000;
    cfg.seed = 12;
    return cfg;
}

}  // namespace

TEST_CASE("recombine hand traces") {
    const std::vector<double> zero(3, 0.0);
    const auto mid = recombine_with(std::vector<double>{1, 0, 0}, std::vector<double>{0, 1, 0}, 0.5, zero);
    REQUIRE(mid);
    CHECK(mid->vec() == std::vector<double>{0.5, 0.5, 0.0});

    const std::vector<double> w{0.9, 0.1, 0.0};
    const auto clipped = recombine_with(w, w, 0.3, std::vector<double>{0.2, -0.2, 0.0});
    REQUIRE(clipped);
    CHECK(clipped->vec() == std::vector<double>{1.0, 0.0, 0.0});

    const auto none = recombine_with(w, w, 0.3, std::vector<double>{-1.0, -1.0, -1.0});
    CHECK(!none);

    Rng rng(1);
    const Portfolio p({0.2, 0.3, 0.5});
    for (int k = 0; k < 20; ++k) {
        const Portfolio child = recombine(p, p, 0.0, rng);
        for (int i = 0; i < 3; ++i) CHECK(child[i] == doctest::Approx(p[i]).epsilon(1e-15));
    }
}

TEST_CASE("recombine stays on the simplex") {
    Rng rng(2);
    Portfolio a = Portfolio::unit(6, 0), b = Portfolio::equal_weight(6);
    for (int k = 0; k < 20000; ++k) {
        const Portfolio c = recombine(a, b, 0.3, rng);
        CHECK(on_simplex(c.weights()));
        a = b;
        b = c;
    }
}

TEST_CASE("in_region") {
    const RiskReturnPoint rr0{0.137048, 0.1111};
    CHECK(in_region(rr0, rr0, 0.1));
    CHECK(in_region({0.130, 0.115}, rr0, 0.1));
    CHECK(!in_region({0.120, 0.110}, rr0, 0.1));
    CHECK(!in_region({0.140, 0.1223}, rr0, 0.1));
    CHECK(in_region({0.9 * 0.2, 1.1 * 0.1}, {0.2, 0.1}, 0.1));
}

TEST_CASE("fitness functions") {
    const Estimates est = toy_estimates();
    const Portfolio w0 = toy_reference_portfolio();
    CHECK(fitness1(w0, w0, est) == 0.0);
    CHECK(fitness2(w0, w0, est, 0.1) == 0.0);

    const auto rr0 = risk_return(w0, est);
    const auto rrs = risk_return(Portfolio::unit(3, 0), est);
    const double expect = -std::hypot(rrs.mu - rr0.mu, rrs.sigma - rr0.sigma);
    CHECK(fitness1(Portfolio::unit(3, 0), w0, est) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(expect == doctest::Approx(-0.0594).epsilon(2e-3));

    const Portfolio w({0.681, 0.128, 0.191});
    REQUIRE(in_region(risk_return(w, est), rr0, 0.1));
    CHECK(fitness2(w, w0, est, 0.1) == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));

    // Outside the region fitness2 falls back to fitness1, which is never positive.
    const Portfolio out = Portfolio::unit(3, 2);
    REQUIRE(!in_region(risk_return(out, est), rr0, 0.1));
    CHECK(fitness2(out, w0, est, 0.1) == fitness1(out, w0, est));
    CHECK(fitness2(out, w0, est, 0.1) < 0.0);
}

TEST_CASE("archive replacement rule") {
    Archive a(CvtPartition({0.0, 0.0, 1.0, 1.0}, 2, BehaviorKind::b1, 0));
    EliteRecord r;
    r.w = Portfolio({0.5, 0.5});
    r.bd.values = {0.1, 0.1};
    r.fitness = -1.0;
    CHECK(a.try_insert(r));
    CHECK(a.occupied() == 1);
    CHECK(!a.try_insert(r));
    r.fitness = -0.5;
    r.w = Portfolio({0.4, 0.6});
    CHECK(a.try_insert(r));
    CHECK(a.slot(0)->fitness == -0.5);
    r.bd.values = {0.9, 0.8};
    CHECK(a.try_insert(r));
    CHECK(a.filled() == std::vector<std::size_t>{0, 1});
}

TEST_CASE("elitism over an enumerated stream") {
    const Estimates est = toy_estimates();
    const CvtPartition one({1.0 / 3, 1.0 / 3, 1.0 / 3}, 3, BehaviorKind::b1, 0);
    const Evaluator ev(est, BehaviorMap(3), one, toy_reference_portfolio(), 0.1, FitnessKind::f1);
    Archive a(one);
    double best = -1e9;
    Rng rng(5);
    for (int k = 0; k < 5000; ++k) {
        auto [niche, rec] = ev.evaluate(sample_portfolio(rng, 3));
        best = std::max(best, rec.fitness);
        a.try_insert(niche, std::move(rec));
    }
    CHECK(a.slot(0)->fitness == best);
}

TEST_CASE("run_qd with one niche keeps the best candidate") {
    QdConfig cfg = small_config();
    cfg.niches = 1;
    cfg.n_max = 10000;
    cfg.n_cvt = 100;
    cfg.fitness = FitnessKind::f1;
    RunOptions opt;
    opt.audit = true;
    const QdResult r = run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio(), opt);
    REQUIRE(!r.audit.empty());
    CHECK(r.archive.slot(0)->fitness == r.audit.back().fitness);
    CHECK(r.archive.eval_count() == 10000);
}

TEST_CASE("run_qd invariants") {
    const Estimates est = toy_estimates();
    const Portfolio w0 = toy_reference_portfolio();
    RunOptions opt;
    opt.audit = true;
    const QdConfig cfg = small_config();
    const QdResult r = run_qd(cfg, est, nullptr, w0, opt);
    CHECK(r.archive.eval_count() == cfg.n_max);
    CHECK(r.snapshots.size() == 2);
    CHECK(r.snapshots.back().evals == cfg.n_max);

    const auto rr0 = risk_return(w0, est);
    for (std::size_t n : r.archive.filled()) {
        const EliteRecord& e = *r.archive.slot(n);
        CHECK(r.archive.partition().niche_index(e.bd) == n);
        CHECK(e.near_optimal == in_region(e.rr, rr0, cfg.c));
        CHECK(std::abs(fitness2(e.w, w0, est, cfg.c) - e.fitness) <= 1e-12);
        const auto rr = risk_return(e.w, est);
        CHECK(rr.mu == e.rr.mu);
        CHECK(rr.sigma == e.rr.sigma);
    }
    for (const Replacement& rep : r.audit) {
        if (rep.previous) {
            CHECK(rep.fitness > *rep.previous);
            // Once a niche holds an in-region elite only in-region candidates can displace it.
            if (*rep.previous >= 0.0) CHECK(rep.fitness > 0.0);
        }
    }
}

TEST_CASE("run_qd initial fill and budget errors") {
    QdConfig cfg = small_config();
    cfg.n_max = 3;
    CHECK_THROWS_AS(run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio()), DataError);

    cfg = small_config();
    cfg.p_init = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = small_config();
    cfg.c = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DataError);
    cfg = small_config();
    cfg.behavior = BehaviorKind::b2;
    CHECK_THROWS_AS(run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio()), DataError);
}

TEST_CASE("run_qd is deterministic") {
    const QdConfig cfg = small_config();
    const auto a = run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio());
    const auto b = run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio());
    REQUIRE(a.archive.filled() == b.archive.filled());
    for (std::size_t n : a.archive.filled()) {
        CHECK(a.archive.slot(n)->w == b.archive.slot(n)->w);
        CHECK(a.archive.slot(n)->fitness == b.archive.slot(n)->fitness);
    }
}

TEST_CASE("batched mode is deterministic across thread counts") {
    QdConfig cfg = small_config();
    cfg.batch = 64;
    cfg.threads = 1;
    const auto a = run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio());
    cfg.threads = 4;
    const auto b = run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio());
    CHECK(a.archive.eval_count() == cfg.n_max);
    REQUIRE(a.archive.filled() == b.archive.filled());
    for (std::size_t n : a.archive.filled()) CHECK(a.archive.slot(n)->w == b.archive.slot(n)->w);
}

TEST_CASE("snapshots") {
    QdConfig cfg = small_config();
    cfg.snapshot_every = 1000;
    std::size_t calls = 0;
    RunOptions opt;
    opt.on_snapshot = [&](const Snapshot&) { ++calls; };
    const auto r = run_qd(cfg, toy_estimates(), nullptr, toy_reference_portfolio(), opt);
    CHECK(r.snapshots.size() == 20);
    CHECK(calls == 20);
    for (const auto& s : r.snapshots) {
        CHECK(s.evals % 1000 == 0);
        CHECK(s.qd_score_mod <= s.qd_score1 + 1e-9);
    }
}
