#pragma once

// Arithmetic inner loops with a scalar reference and an AVX2 variant.
//
// The dispatching entry points in qdport::kernels pick the best variant the
// CPU supports on first use. Setting QDPORT_SIMD=scalar in the environment,
// or calling set_level(), pins the scalar path.
//
// Point sets are passed in "lane" layout: coordinate k of point j lives at
// soa[k * stride + j]. The distance kernels accumulate coordinates in order
// 0..dim-1 with separate multiply and add, so both variants return
// bit-identical squared distances.

#include <cstddef>
#include <limits>
#include <string_view>

namespace qdport::kernels {

enum class Level { scalar, avx2 };

struct Nearest {
    std::size_t index = 0;
    double dist2 = std::numeric_limits<double>::infinity();
};

struct NearestTwo {
    std::size_t index = 0;
    double dist2 = std::numeric_limits<double>::infinity();
    double second2 = std::numeric_limits<double>::infinity();
};

struct Table {
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*quad_form)(const double* s, const double* w, std::size_t n);
    void (*sq_distances)(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                         const double* q, double* out);
    Nearest (*nearest)(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                       const double* q);
    NearestTwo (*nearest_two)(const double* soa, std::size_t count, std::size_t stride,
                              std::size_t dim, const double* q);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double quad_form(const double* s, const double* w, std::size_t n);
void sq_distances(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                  const double* q, double* out);
Nearest nearest(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                const double* q);
NearestTwo nearest_two(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                       const double* q);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define QDPORT_HAS_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double quad_form(const double* s, const double* w, std::size_t n);
void sq_distances(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                  const double* q, double* out);
Nearest nearest(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                const double* q);
NearestTwo nearest_two(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                       const double* q);
}  // namespace avx2
#endif

bool cpu_supports(Level level) noexcept;
Level active_level() noexcept;
/// Pins a level; falls back to scalar if the CPU lacks it. Not thread-safe.
void set_level(Level level) noexcept;
std::string_view level_name(Level level) noexcept;
const Table& table(Level level) noexcept;

inline double dot(const double* a, const double* b, std::size_t n) {
    return table(active_level()).dot(a, b, n);
}
/// wᵀ S w for a row-major symmetric n×n matrix.
inline double quad_form(const double* s, const double* w, std::size_t n) {
    return table(active_level()).quad_form(s, w, n);
}
inline void sq_distances(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                         const double* q, double* out) {
    table(active_level()).sq_distances(soa, count, stride, dim, q, out);
}
/// Ties resolve to the lowest index.
inline Nearest nearest(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                       const double* q) {
    return table(active_level()).nearest(soa, count, stride, dim, q);
}
inline NearestTwo nearest_two(const double* soa, std::size_t count, std::size_t stride,
                              std::size_t dim, const double* q) {
    return table(active_level()).nearest_two(soa, count, stride, dim, q);
}

/// Lane stride for `count` points: rounded up to a multiple of 4.
constexpr std::size_t padded(std::size_t count) noexcept { return (count + 3) & ~std::size_t{3}; }

}  // namespace qdport::kernels
