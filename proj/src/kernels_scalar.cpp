// Scalar reference backend. The stripe-of-4 accumulation order below is the
// contract the AVX2 backend reproduces lane for lane; keep the two files in
// sync when touching either.

#include "aniso/kernels.hpp"

namespace aniso::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        acc0 += a[q] * b[q];
        acc1 += a[q + 1] * b[q + 1];
        acc2 += a[q + 2] * b[q + 2];
        acc3 += a[q + 3] * b[q + 3];
    }
    double tail = 0.0;
    for (; q < n; ++q) tail += a[q] * b[q];
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

double sum_scalar(const double* x, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        acc0 += x[q];
        acc1 += x[q + 1];
        acc2 += x[q + 2];
        acc3 += x[q + 3];
    }
    double tail = 0.0;
    for (; q < n; ++q) tail += x[q];
    return ((acc0 + acc1) + (acc2 + acc3)) + tail;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t q = 0; q < n; ++q) y[q] += alpha * x[q];
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
    for (std::size_t q = 0; q < n; ++q) y[q] = a * x[q] + b * y[q];
}

void ewise_mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t q = 0; q < n; ++q) out[q] = a[q] * b[q];
}

void clamp_scalar(const double* x, double k, double* out, std::size_t n) {
    // matches _mm256_max_pd / _mm256_min_pd semantics
    for (std::size_t q = 0; q < n; ++q) {
        double t = (x[q] > -k) ? x[q] : -k;
        out[q] = (t < k) ? t : k;
    }
}

void stencil_row_scalar(const StencilArgs& s, std::size_t begin, std::size_t len) {
    const double* u = s.u;
    const double* z = s.z;
    for (std::size_t q = begin; q < begin + len; ++q) {
        const double uq = u[q];
        double acc = 0.0;
        for (int d = 0; d < s.dim; ++d) {
            const std::ptrdiff_t st = s.stride[d];
            const double* w = s.w[d];
            acc += w[q] * (uq - u[q + st]) + w[q - st] * (uq - u[q - st]);
        }
        s.out[q] = z[q] * uq + s.inv_h2 * acc;
    }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",   dot_scalar,   sum_scalar,   axpy_scalar,
        axpby_scalar, ewise_mul_scalar, clamp_scalar, stencil_row_scalar,
    };
    return backend;
}

}  // namespace aniso::kernels
