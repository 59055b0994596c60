#include "qdport/kernels.hpp"

#if defined(QDPORT_HAS_AVX2_KERNELS)

#include <immintrin.h>

#define QDPORT_AVX2 __attribute__((target("avx2")))

namespace qdport::kernels::avx2 {
namespace {

QDPORT_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

QDPORT_AVX2 inline __m256d block_dist2(const double* soa, std::size_t j, std::size_t stride,
                                       std::size_t dim, const double* q) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
        const __m256d c = _mm256_loadu_pd(soa + k * stride + j);
        const __m256d d = _mm256_sub_pd(c, _mm256_set1_pd(q[k]));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    return acc;
}

inline double point_dist2(const double* soa, std::size_t j, std::size_t stride, std::size_t dim,
                          const double* q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double d = soa[k * stride + j] - q[k];
        acc = acc + d * d;
    }
    return acc;
}

}  // namespace

QDPORT_AVX2 double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

QDPORT_AVX2 double quad_form(const double* s, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * dot(s + i * n, w, n);
    return acc;
}

QDPORT_AVX2 void sq_distances(const double* soa, std::size_t count, std::size_t stride,
                              std::size_t dim, const double* q, double* out) {
    std::size_t j = 0;
    for (; j + 4 <= count; j += 4) _mm256_storeu_pd(out + j, block_dist2(soa, j, stride, dim, q));
    for (; j < count; ++j) out[j] = point_dist2(soa, j, stride, dim, q);
}

QDPORT_AVX2 Nearest nearest(const double* soa, std::size_t count, std::size_t stride,
                            std::size_t dim, const double* q) {
    Nearest best;
    std::size_t j = 0;
    if (count >= 4) {
        __m256d best_d = _mm256_set1_pd(best.dist2);
        __m256d best_i = _mm256_setzero_pd();
        __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
        const __m256d step = _mm256_set1_pd(4.0);
        for (; j + 4 <= count; j += 4) {
            const __m256d d = block_dist2(soa, j, stride, dim, q);
            const __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
            best_d = _mm256_blendv_pd(best_d, d, lt);
            best_i = _mm256_blendv_pd(best_i, idx, lt);
            idx = _mm256_add_pd(idx, step);
        }
        alignas(32) double ds[4];
        alignas(32) double is[4];
        _mm256_store_pd(ds, best_d);
        _mm256_store_pd(is, best_i);
        for (int l = 0; l < 4; ++l) {
            const auto li = static_cast<std::size_t>(is[l]);
            if (ds[l] < best.dist2 || (ds[l] == best.dist2 && li < best.index)) {
                best.dist2 = ds[l];
                best.index = li;
            }
        }
    }
    for (; j < count; ++j) {
        const double d = point_dist2(soa, j, stride, dim, q);
        if (d < best.dist2) {
            best.dist2 = d;
            best.index = j;
        }
    }
    return best;
}

QDPORT_AVX2 NearestTwo nearest_two(const double* soa, std::size_t count, std::size_t stride,
                                   std::size_t dim, const double* q) {
    NearestTwo best;
    std::size_t j = 0;
    if (count >= 4) {
        const __m256d inf = _mm256_set1_pd(best.dist2);
        __m256d best_d = inf;
        __m256d second_d = inf;
        __m256d best_i = _mm256_setzero_pd();
        __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
        const __m256d step = _mm256_set1_pd(4.0);
        for (; j + 4 <= count; j += 4) {
            const __m256d d = block_dist2(soa, j, stride, dim, q);
            const __m256d lt = _mm256_cmp_pd(d, best_d, _CMP_LT_OQ);
            second_d = _mm256_blendv_pd(_mm256_min_pd(second_d, d), best_d, lt);
            best_d = _mm256_blendv_pd(best_d, d, lt);
            best_i = _mm256_blendv_pd(best_i, idx, lt);
            idx = _mm256_add_pd(idx, step);
        }
        alignas(32) double ds[4];
        alignas(32) double ss[4];
        alignas(32) double is[4];
        _mm256_store_pd(ds, best_d);
        _mm256_store_pd(ss, second_d);
        _mm256_store_pd(is, best_i);
        int winner = 0;
        for (int l = 1; l < 4; ++l) {
            if (ds[l] < ds[winner] || (ds[l] == ds[winner] && is[l] < is[winner])) winner = l;
        }
        best.dist2 = ds[winner];
        best.index = static_cast<std::size_t>(is[winner]);
        for (int l = 0; l < 4; ++l) {
            if (l != winner && ds[l] < best.second2) best.second2 = ds[l];
            if (ss[l] < best.second2) best.second2 = ss[l];
        }
    }
    for (; j < count; ++j) {
        const double d = point_dist2(soa, j, stride, dim, q);
        if (d < best.dist2) {
            best.second2 = best.dist2;
            best.dist2 = d;
            best.index = j;
        } else if (d < best.second2) {
            best.second2 = d;
        }
    }
    return best;
}

}  // namespace qdport::kernels::avx2

#endif
