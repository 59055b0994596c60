#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "qdport/kernels.hpp"

using namespace qdport;
namespace k = qdport::kernels;

namespace {

struct LaneSet {
    std::vector<double> soa;
    std::size_t count, stride, dim;
};

LaneSet random_lanes(std::mt19937_64& rng, std::size_t count, std::size_t dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LaneSet s{std::vector<double>(k::padded(count) * dim, 0.0), count, k::padded(count), dim};
    for (std::size_t d = 0; d < dim; ++d)
        for (std::size_t j = 0; j < count; ++j) s.soa[d * s.stride + j] = u(rng);
    return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u}) {
        std::vector<double> a(n), b(n), s(n * n);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) s[i * n + j] = s[j * n + i] = u(rng);
        double dot = 0, q = 0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += a[i] * b[i];
            for (std::size_t j = 0; j < n; ++j) q += a[i] * s[i * n + j] * a[j];
        }
        CHECK(k::scalar::dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-13));
        CHECK(k::scalar::quad_form(s.data(), a.data(), n) == doctest::Approx(q).epsilon(1e-12));
    }
}

TEST_CASE("nearest breaks ties towards the lowest index") {
    // Centroids 1 and 3 coincide; 0 and 2 are farther away.
    const std::size_t stride = 4, dim = 2;
    std::vector<double> soa{5.0, 1.0, -5.0, 1.0, 5.0, 1.0, 5.0, 1.0};
    const double q[2] = {1.0, 1.0};
    for (auto level : {k::Level::scalar, k::Level::avx2}) {
        if (!k::cpu_supports(level)) continue;
        const auto& t = k::table(level);
        const auto n = t.nearest(soa.data(), 4, stride, dim, q);
        CHECK(n.index == 1);
        CHECK(n.dist2 == 0.0);
        const auto n2 = t.nearest_two(soa.data(), 4, stride, dim, q);
        CHECK(n2.index == 1);
        CHECK(n2.second2 == 0.0);
    }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
    if (!k::cpu_supports(k::Level::avx2)) {
        MESSAGE("CPU lacks AVX2; equivalence test skipped");
        return;
    }
    const auto& sc = k::table(k::Level::scalar);
    const auto& vx = k::table(k::Level::avx2);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t count = 1; count <= 41; count += 4)
        for (std::size_t dim = 1; dim <= 13; dim += 3) {
            const LaneSet s = random_lanes(rng, count, dim);
            for (int rep = 0; rep < 5; ++rep) {
                std::vector<double> q(dim);
                for (auto& x : q) x = u(rng);
                std::vector<double> d_sc(count), d_vx(count);
                sc.sq_distances(s.soa.data(), count, s.stride, dim, q.data(), d_sc.data());
                vx.sq_distances(s.soa.data(), count, s.stride, dim, q.data(), d_vx.data());
                for (std::size_t j = 0; j < count; ++j) CHECK(same_bits(d_sc[j], d_vx[j]));
                const auto a = sc.nearest(s.soa.data(), count, s.stride, dim, q.data());
                const auto b = vx.nearest(s.soa.data(), count, s.stride, dim, q.data());
                CHECK(a.index == b.index);
                CHECK(same_bits(a.dist2, b.dist2));
                const auto a2 = sc.nearest_two(s.soa.data(), count, s.stride, dim, q.data());
                const auto b2 = vx.nearest_two(s.soa.data(), count, s.stride, dim, q.data());
                CHECK(a2.index == b2.index);
                CHECK(same_bits(a2.dist2, b2.dist2));
                CHECK(same_bits(a2.second2, b2.second2));
            }
        }
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 31u, 105u}) {
        std::vector<double> a(n), b(n), s(n * n);
        for (auto& x : a) x = u(rng);
        for (auto& x : b) x = u(rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) s[i * n + j] = s[j * n + i] = u(rng);
        CHECK(vx.dot(a.data(), b.data(), n) == doctest::Approx(sc.dot(a.data(), b.data(), n)).epsilon(1e-13));
        CHECK(vx.quad_form(s.data(), a.data(), n) ==
              doctest::Approx(sc.quad_form(s.data(), a.data(), n)).epsilon(1e-12));
    }
}

TEST_CASE("level pinning") {
    const k::Level before = k::active_level();
    k::set_level(k::Level::scalar);
    CHECK(k::active_level() == k::Level::scalar);
    CHECK(k::level_name(k::Level::scalar) == "scalar");
    k::set_level(before);
    CHECK(k::active_level() == before);
}
