#include "qdport/kernels.hpp"

namespace qdport::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double quad_form(const double* s, const double* w, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = s + i * n;
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += row[j] * w[j];
        acc += w[i] * r;
    }
    return acc;
}

void sq_distances(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                  const double* q, double* out) {
    for (std::size_t j = 0; j < count; ++j) out[j] = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double* lane = soa + k * stride;
        const double qk = q[k];
        for (std::size_t j = 0; j < count; ++j) {
            const double d = lane[j] - qk;
            out[j] = out[j] + d * d;
        }
    }
}

Nearest nearest(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                const double* q) {
    Nearest best;
    for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = soa[k * stride + j] - q[k];
            acc = acc + d * d;
        }
        if (acc < best.dist2) {
            best.dist2 = acc;
            best.index = j;
        }
    }
    return best;
}

NearestTwo nearest_two(const double* soa, std::size_t count, std::size_t stride, std::size_t dim,
                       const double* q) {
    NearestTwo best;
    for (std::size_t j = 0; j < count; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = soa[k * stride + j] - q[k];
            acc = acc + d * d;
        }
        if (acc < best.dist2) {
            best.second2 = best.dist2;
            best.dist2 = acc;
            best.index = j;
        } else if (acc < best.second2) {
            best.second2 = acc;
        }
    }
    return best;
}

}  // namespace qdport::kernels::scalar
