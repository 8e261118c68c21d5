// AVX2 backend. Per-lane arithmetic mirrors kernels_scalar.cpp exactly
// (same accumulation stripes, no FMA, contraction disabled), so results are
// bit-identical to the scalar reference.

#include "aniso/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace aniso::kernels {
namespace {

inline double reduce_stripes(__m256d acc, double tail) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + tail;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        const __m256d av = _mm256_loadu_pd(a + q);
        const __m256d bv = _mm256_loadu_pd(b + q);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
    }
    double tail = 0.0;
    for (; q < n; ++q) tail += a[q] * b[q];
    return reduce_stripes(acc, tail);
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + q));
    double tail = 0.0;
    for (; q < n; ++q) tail += x[q];
    return reduce_stripes(acc, tail);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + q),
                                        _mm256_mul_pd(av, _mm256_loadu_pd(x + q)));
        _mm256_storeu_pd(y + q, r);
    }
    for (; q < n; ++q) y[q] += alpha * x[q];
}

void axpby_avx2(double a, const double* x, double b, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    const __m256d bv = _mm256_set1_pd(b);
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        const __m256d r = _mm256_add_pd(_mm256_mul_pd(av, _mm256_loadu_pd(x + q)),
                                        _mm256_mul_pd(bv, _mm256_loadu_pd(y + q)));
        _mm256_storeu_pd(y + q, r);
    }
    for (; q < n; ++q) y[q] = a * x[q] + b * y[q];
}

void ewise_mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4)
        _mm256_storeu_pd(out + q, _mm256_mul_pd(_mm256_loadu_pd(a + q), _mm256_loadu_pd(b + q)));
    for (; q < n; ++q) out[q] = a[q] * b[q];
}

void clamp_avx2(const double* x, double k, double* out, std::size_t n) {
    const __m256d hi = _mm256_set1_pd(k);
    const __m256d lo = _mm256_set1_pd(-k);
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        const __m256d t = _mm256_max_pd(_mm256_loadu_pd(x + q), lo);
        _mm256_storeu_pd(out + q, _mm256_min_pd(t, hi));
    }
    for (; q < n; ++q) {
        double t = (x[q] > -k) ? x[q] : -k;
        out[q] = (t < k) ? t : k;
    }
}

void stencil_row_avx2(const StencilArgs& s, std::size_t begin, std::size_t len) {
    const double* u = s.u;
    const double* z = s.z;
    const __m256d ih2 = _mm256_set1_pd(s.inv_h2);
    std::size_t q = begin;
    const std::size_t end = begin + len;
    for (; q + 4 <= end; q += 4) {
        const __m256d uq = _mm256_loadu_pd(u + q);
        __m256d acc = _mm256_setzero_pd();
        for (int d = 0; d < s.dim; ++d) {
            const std::ptrdiff_t st = s.stride[d];
            const double* w = s.w[d];
            const __m256d t1 = _mm256_mul_pd(_mm256_loadu_pd(w + q),
                                             _mm256_sub_pd(uq, _mm256_loadu_pd(u + q + st)));
            const __m256d t2 = _mm256_mul_pd(_mm256_loadu_pd(w + q - st),
                                             _mm256_sub_pd(uq, _mm256_loadu_pd(u + q - st)));
            acc = _mm256_add_pd(acc, _mm256_add_pd(t1, t2));
        }
        const __m256d r = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(z + q), uq),
                                        _mm256_mul_pd(ih2, acc));
        _mm256_storeu_pd(s.out + q, r);
    }
    for (; q < end; ++q) {
        const double uqs = u[q];
        double acc = 0.0;
        for (int d = 0; d < s.dim; ++d) {
            const std::ptrdiff_t st = s.stride[d];
            const double* w = s.w[d];
            acc += w[q] * (uqs - u[q + st]) + w[q - st] * (uqs - u[q - st]);
        }
        s.out[q] = z[q] * uqs + s.inv_h2 * acc;
    }
}

}  // namespace

const Backend* avx2_backend() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Backend backend{
        "avx2",     dot_avx2,     sum_avx2,     axpy_avx2,
        axpby_avx2, ewise_mul_avx2, clamp_avx2, stencil_row_avx2,
    };
    return &backend;
}

}  // namespace aniso::kernels

#else  // !__AVX2__

namespace aniso::kernels {
const Backend* avx2_backend() { return nullptr; }
}  // namespace aniso::kernels

#endif
