#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "qdport/behavior.hpp"
#include "qdport/estimation.hpp"

using namespace qdport;

namespace {

AssetUniverse small_universe() {
    return AssetUniverse{{"a", "b", "c", "d"}, {0, 2, 1, 2}, {10.0, 40.0, 20.0, 30.0}, 3};
}

}  // namespace

TEST_CASE("behavior_b1 is the identity") {
    CHECK(behavior_b1(Portfolio({0.5, 0.5, 0.0})).values == std::vector<double>{0.5, 0.5, 0.0});
    CHECK(behavior_b1(toy_reference_portfolio()).values == std::vector<double>{0.581, 0.228, 0.191});
}

TEST_CASE("behavior_b2") {
    const AssetUniverse u = small_universe();
    const auto bd = behavior_b2(Portfolio::unit(4, 1), u);
    CHECK(bd.values == std::vector<double>{0.0, 0.0, 1.0, 1.0});

    const AssetUniverse one{{"a", "b", "c"}, {0, 0, 0}, {1.0, 2.0, 6.0}, 1};
    const auto eq = behavior_b2(Portfolio::equal_weight(3), one);
    REQUIRE(eq.values.size() == 2);
    CHECK(eq.values[0] == doctest::Approx(1.0));
    CHECK(eq.values[1] == doctest::Approx(3.0 / 6.0));

    const Portfolio w({0.1, 0.2, 0.3, 0.4});
    const auto b = behavior_b2(w, u);
    CHECK(b.values[0] == doctest::Approx(0.1));
    CHECK(b.values[1] == doctest::Approx(0.3));
    CHECK(b.values[2] == doctest::Approx(0.6));
    CHECK(b.values[3] == doctest::Approx((0.1 * 10 + 0.2 * 40 + 0.3 * 20 + 0.4 * 30) / 40.0));

    // Relabel sectors 0→2, 1→0, 2→1; exposures permute accordingly.
    AssetUniverse r = u;
    const int relabel[3] = {2, 0, 1};
    for (auto& s : r.sector_of) s = relabel[s];
    const auto br = behavior_b2(w, r);
    for (int s = 0; s < 3; ++s) CHECK(br.values[relabel[s]] == doctest::Approx(b.values[s]).epsilon(1e-15));
    CHECK(br.values[3] == b.values[3]);

    const BehaviorMap map(u);
    CHECK(map.dim() == 4);
    CHECK(map(w).values == b.values);
}

TEST_CASE("simplex samplers") {
    Rng rng(1);
    std::vector<double> w(4), mean(4, 0.0);
    for (auto sampler : {SimplexSampler::dirichlet, SimplexSampler::cube}) {
        std::fill(mean.begin(), mean.end(), 0.0);
        for (int k = 0; k < 20000; ++k) {
            sample_simplex(rng, w, sampler);
            CHECK(on_simplex(w));
            for (int i = 0; i < 4; ++i) mean[i] += w[i] / 20000.0;
        }
        for (double m : mean) CHECK(m == doctest::Approx(0.25).epsilon(0.02));
    }
    CHECK(parse_sampler("cube") == SimplexSampler::cube);
    CHECK_THROWS_AS(parse_sampler("sobol"), DataError);
}

TEST_CASE("kmeans degenerate cases") {
    Rng rng(3);
    std::vector<double> pts;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) pts.push_back(u(rng));
    const auto one = kmeans(pts, 2, 1, rng);
    double mx = 0, my = 0;
    for (int i = 0; i < 100; ++i) {
        mx += pts[2 * i] / 100.0;
        my += pts[2 * i + 1] / 100.0;
    }
    CHECK(one.centroids[0] == doctest::Approx(mx).epsilon(1e-12));
    CHECK(one.centroids[1] == doctest::Approx(my).epsilon(1e-12));

    const auto all = kmeans(pts, 2, 100, rng);
    std::set<std::pair<double, double>> a, b;
    for (int i = 0; i < 100; ++i) {
        a.insert({pts[2 * i], pts[2 * i + 1]});
        b.insert({all.centroids[2 * i], all.centroids[2 * i + 1]});
    }
    CHECK(a == b);

    std::vector<double> dup{0.1, 0.1, 0.1, 0.1, 0.2, 0.2};
    CHECK_THROWS_AS(kmeans(dup, 2, 3, rng), DataError);
}

TEST_CASE("kmeans labels agree with niche lookup") {
    Rng rng(4);
    std::vector<double> pts(3 * 2000);
    for (std::size_t i = 0; i < 2000; ++i) sample_simplex(rng, std::span<double>(pts.data() + 3 * i, 3));
    const auto km = kmeans(pts, 3, 50, rng);
    const CvtPartition p(km.centroids, 3, BehaviorKind::b1, 0);
    for (std::size_t i = 0; i < 2000; ++i)
        CHECK(p.niche_index(std::span<const double>(pts.data() + 3 * i, 3)) == km.labels[i]);
}

TEST_CASE("build_cvt") {
    const BehaviorMap b1(3);
    const CvtPartition a = build_cvt(b1, 40, 2000, 17);
    const CvtPartition b = build_cvt(b1, 40, 2000, 17);
    const CvtPartition c = build_cvt(b1, 40, 2000, 18);
    CHECK(a == b);
    CHECK(a.centroids() != c.centroids());
    CHECK(c.niches() == 40);
    for (std::size_t i = 0; i < a.niches(); ++i) {
        CHECK(on_simplex(a.centroid(i), 1e-12));
        for (std::size_t j = 0; j < i; ++j) {
            const auto x = a.centroid(i), y = a.centroid(j);
            CHECK(!std::equal(x.begin(), x.end(), y.begin()));
        }
    }

    const BehaviorMap b2(small_universe());
    const CvtPartition p2 = build_cvt(b2, 20, 1000, 5);
    CHECK(p2.dim() == 4);
    CHECK(p2.kind() == BehaviorKind::b2);
    for (std::size_t i = 0; i < p2.niches(); ++i) {
        const auto c2 = p2.centroid(i);
        CHECK(on_simplex(c2.first(3), 1e-12));
        CHECK(c2[3] > 0.0);
        CHECK(c2[3] <= 1.0);
    }
}

TEST_CASE("niche_index") {
    const CvtPartition single({0.3, 0.3, 0.4}, 3, BehaviorKind::b1, 0);
    CHECK(single.niche_index(std::vector<double>{1.0, 0.0, 0.0}) == 0);

    const CvtPartition p = build_cvt(BehaviorMap(5), 300, 3000, 2);
    for (std::size_t i = 0; i < p.niches(); i += 37) CHECK(p.niche_index(p.centroid(i)) == i);

    Rng rng(8);
    std::vector<double> q(5);
    for (int k = 0; k < 200; ++k) {
        sample_simplex(rng, q);
        CHECK(p.niche_index(q) == oracle::linear_scan(p.centroids(), 5, q));
    }
    CHECK_THROWS_AS(p.niche_index(std::vector<double>{0.5, 0.5}), DataError);
}
