#pragma once

// Data-parallel kernels behind the inner loops: the BLAS-1 style vector ops
// of the conjugate-gradient subsolver, the lagged-operator stencil apply,
// and field truncation.
//
// Two backends are compiled: a scalar reference and, on x86-64, an AVX2
// variant. Reductions in the scalar reference accumulate in four independent
// stripes combined in a fixed order -- exactly the order the 4-lane AVX2
// code produces -- and both translation units are built with floating-point
// contraction disabled, so the backends are bit-identical. Selection happens
// once per process (cpuid) and can be forced with the environment variable
// ANISO_KERNEL_BACKEND=scalar|avx2.

#include <cstddef>

namespace aniso::kernels {

inline constexpr int max_dim = 4;

// Arguments of the symmetric lagged operator
//   (L u)(q) = z(q) u(q) + inv_h2 * sum_d [ w_d(q)   (u(q) - u(q+s_d))
//                                         + w_d(q-s_d)(u(q) - u(q-s_d)) ].
// All arrays are box-sized; callers guarantee q +- s_d stays in the box for
// every node the kernel visits.
struct StencilArgs {
    const double* u;
    double* out;
    const double* w[max_dim];
    const double* z;
    std::ptrdiff_t stride[max_dim];
    int dim;
    double inv_h2;
};

struct Backend {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
    void (*ewise_mul)(const double* a, const double* b, double* out, std::size_t n);
    void (*clamp)(const double* x, double k, double* out, std::size_t n);
    void (*stencil_row)(const StencilArgs& s, std::size_t begin, std::size_t len);
};

const Backend& scalar_backend();
const Backend* avx2_backend();  // nullptr if not compiled in or unsupported by the CPU
const Backend& active();

}  // namespace aniso::kernels
