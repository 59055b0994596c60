#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qdport/behavior.hpp"
#include "qdport/kernels.hpp"

namespace qdport {
namespace {

// Row-major n×d to kernel lane layout.
std::vector<double> to_lanes(std::span<const double> rows, std::size_t n, std::size_t dim) {
    const std::size_t stride = kernels::padded(n);
    std::vector<double> lanes(stride * dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < dim; ++k) lanes[k * stride + i] = rows[i * dim + k];
    return lanes;
}

double dist2(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        acc = acc + d * d;
    }
    return acc;
}

std::vector<double> seed_plus_plus(std::span<const double> points, const std::vector<double>& lanes,
                                   std::size_t n, std::size_t dim, std::size_t k, Rng& rng) {
    const std::size_t stride = kernels::padded(n);
    std::vector<double> centers(k * dim);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::size_t first = pick(rng);
    std::copy_n(points.data() + first * dim, dim, centers.data());
    std::vector<double> d2(n), tmp(n);
    kernels::sq_distances(lanes.data(), n, stride, dim, centers.data(), d2.data());

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double x : d2) total += x;
        if (!(total > 0.0)) {
            throw DataError("build_cvt: " + std::to_string(k) + " niches requested but only " +
                            std::to_string(c) + " distinct samples");
        }
        const double r = unif(rng) * total;
        std::size_t chosen = n;
        std::size_t last_positive = 0;
        double cum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] > 0.0) last_positive = i;
            cum += d2[i];
            if (cum > r) {
                chosen = i;
                break;
            }
        }
        if (chosen == n) chosen = last_positive;
        double* center = centers.data() + c * dim;
        std::copy_n(points.data() + chosen * dim, dim, center);
        kernels::sq_distances(lanes.data(), n, stride, dim, center, tmp.data());
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], tmp[i]);
    }
    return centers;
}

}  // namespace

CvtPartition::CvtPartition(std::vector<double> centroids, std::size_t dim, BehaviorKind kind,
                           std::uint64_t seed)
    : centroids_(std::move(centroids)), dim_(dim), kind_(kind), seed_(seed) {
    if (dim_ == 0 || centroids_.empty() || centroids_.size() % dim_ != 0)
        throw DataError("cvt: centroid buffer does not hold whole rows of the given dimension");
    niches_ = centroids_.size() / dim_;
    stride_ = kernels::padded(niches_);
    lanes_ = to_lanes(centroids_, niches_, dim_);
}

std::size_t CvtPartition::niche_index(std::span<const double> bd) const {
    if (bd.size() != dim_)
        throw DataError("niche_index: descriptor has dimension " + std::to_string(bd.size()) +
                        ", partition has " + std::to_string(dim_));
    return kernels::nearest(lanes_.data(), niches_, stride_, dim_, bd.data()).index;
}

KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, Rng& rng) {
    if (dim == 0 || points.size() % dim != 0) throw DataError("kmeans: ragged point buffer");
    const std::size_t n = points.size() / dim;
    if (k < 1 || n < k)
        throw DataError("kmeans: need 1 <= k <= number of samples (k=" + std::to_string(k) +
                        ", n=" + std::to_string(n) + ")");

    const std::vector<double> lanes = to_lanes(points, n, dim);
    std::vector<double> centers = seed_plus_plus(points, lanes, n, dim, k, rng);
    const std::size_t cstride = kernels::padded(k);
    std::vector<double> clanes = to_lanes(centers, k, dim);

    // Hamerly: upper bound on the distance to the assigned center, lower bound
    // on the distance to any other center.
    std::vector<std::size_t> label(n);
    std::vector<double> upper(n), lower(n);
    auto full_assign = [&](std::size_t i) {
        const auto nt = kernels::nearest_two(clanes.data(), k, cstride, dim, points.data() + i * dim);
        label[i] = nt.index;
        upper[i] = std::sqrt(nt.dist2);
        lower[i] = std::sqrt(nt.second2);
    };
    for (std::size_t i = 0; i < n; ++i) full_assign(i);

    KMeansResult out;
    std::vector<double> sums(k * dim), shift(k), half_gap(k);
    std::vector<std::size_t> count(k);
    for (int iter = 1; iter <= kKMeansMaxIterations; ++iter) {
        out.iterations = iter;
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = points.data() + i * dim;
            double* s = sums.data() + label[i] * dim;
            for (std::size_t d = 0; d < dim; ++d) s[d] += x[d];
            ++count[label[i]];
        }
        // Empty cluster: move it onto the point furthest from its own center.
        for (std::size_t j = 0; j < k; ++j) {
            if (count[j] > 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (count[label[i]] > 1 && (far == n || upper[i] > upper[far])) far = i;
            }
            if (far == n) continue;
            const double* x = points.data() + far * dim;
            double* from = sums.data() + label[far] * dim;
            for (std::size_t d = 0; d < dim; ++d) from[d] -= x[d];
            --count[label[far]];
            std::copy_n(x, dim, sums.data() + j * dim);
            count[j] = 1;
            label[far] = j;
            upper[far] = 0.0;
            lower[far] = 0.0;
        }

        double max_shift = 0.0, second_shift = 0.0;
        std::size_t max_at = 0;
        for (std::size_t j = 0; j < k; ++j) {
            double* c = centers.data() + j * dim;
            double moved2 = 0.0;
            if (count[j] > 0) {
                const double inv = 1.0 / static_cast<double>(count[j]);
                for (std::size_t d = 0; d < dim; ++d) {
                    const double next = sums[j * dim + d] * inv;
                    const double delta = next - c[d];
                    moved2 += delta * delta;
                    c[d] = next;
                }
            }
            shift[j] = std::sqrt(moved2);
            if (shift[j] > max_shift) {
                second_shift = max_shift;
                max_shift = shift[j];
                max_at = j;
            } else if (shift[j] > second_shift) {
                second_shift = shift[j];
            }
        }
        clanes = to_lanes(centers, k, dim);
        if (max_shift < kKMeansShiftTolerance) {
            out.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            upper[i] += shift[label[i]];
            lower[i] -= label[i] == max_at ? second_shift : max_shift;
        }
        for (std::size_t j = 0; j < k; ++j) {
            const auto nt = kernels::nearest_two(clanes.data(), k, cstride, dim, centers.data() + j * dim);
            half_gap[j] = 0.5 * std::sqrt(nt.second2);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double bound = std::max(half_gap[label[i]], lower[i]);
            if (upper[i] <= bound) continue;
            upper[i] = std::sqrt(dist2(points.data() + i * dim, centers.data() + label[i] * dim, dim));
            if (upper[i] <= bound) continue;
            full_assign(i);
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        label[i] = kernels::nearest(clanes.data(), k, cstride, dim, points.data() + i * dim).index;
    out.centroids = std::move(centers);
    out.labels = std::move(label);
    return out;
}

CvtPartition build_cvt(const BehaviorMap& behavior, std::size_t niches, std::size_t n_cvt, Rng& rng,
                       std::uint64_t seed_tag, SimplexSampler sampler) {
    if (niches < 1 || n_cvt < niches)
        throw DataError("build_cvt: need n_cvt >= M >= 1 (M=" + std::to_string(niches) +
                        ", n_cvt=" + std::to_string(n_cvt) + ")");
    const std::size_t dim = behavior.dim();
    std::vector<double> samples(n_cvt * dim);
    std::vector<double> w(behavior.assets());
    for (std::size_t i = 0; i < n_cvt; ++i) {
        sample_simplex(rng, w, sampler);
        behavior.describe(w, std::span<double>(samples.data() + i * dim, dim));
    }
    KMeansResult km = kmeans(samples, dim, niches, rng);
    return CvtPartition(std::move(km.centroids), dim, behavior.kind(), seed_tag);
}

CvtPartition build_cvt(const BehaviorMap& behavior, std::size_t niches, std::size_t n_cvt,
                       std::uint64_t seed, SimplexSampler sampler) {
    Rng rng(seed);
    return build_cvt(behavior, niches, n_cvt, rng, seed, sampler);
}

}  // namespace qdport
