#include "aniso/modular.hpp"

#include <cmath>
#include <stdexcept>

namespace aniso {

namespace {

void require_same_box(const GridFunction& u, const ExponentField& p) {
    if (!u.grid().same_box(p.grid())) throw std::invalid_argument("grid box mismatch");
}

double modular_scaled(const GridFunction& u, const ExponentField& p, double inv_lambda) {
    // Stripe accumulation keeps the reduction order fixed.
    double acc0 = 0.0, acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    const std::size_t n = u.size();
    std::size_t q = 0;
    for (; q + 4 <= n; q += 4) {
        acc0 += std::pow(std::abs(u[q] * inv_lambda), p[q]);
        acc1 += std::pow(std::abs(u[q + 1] * inv_lambda), p[q + 1]);
        acc2 += std::pow(std::abs(u[q + 2] * inv_lambda), p[q + 2]);
        acc3 += std::pow(std::abs(u[q + 3] * inv_lambda), p[q + 3]);
    }
    double tail = 0.0;
    for (; q < n; ++q) tail += std::pow(std::abs(u[q] * inv_lambda), p[q]);
    return (((acc0 + acc1) + (acc2 + acc3)) + tail) * u.grid().cell_volume();
}

}  // namespace

double modular(const GridFunction& u, const ExponentField& p) {
    require_same_box(u, p);
    return modular_scaled(u, p, 1.0);
}

double luxemburg_norm(const GridFunction& u, const ExponentField& p, double tol) {
    require_same_box(u, p);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const double umax = u.max_abs();
    if (umax == 0.0) return 0.0;

    const double meas = static_cast<double>(u.size()) * u.grid().cell_volume();
    double hi = umax * std::pow(meas, 1.0 / p.p_minus()) + 1.0;
    double lo = std::min(1e-3 * hi, 1.0);

    int expand = 0;
    while (modular_scaled(u, p, 1.0 / hi) > 1.0) {
        hi *= 4.0;
        if (++expand > 300) throw std::runtime_error("luxemburg norm: bracket expansion failed");
    }
    expand = 0;
    while (modular_scaled(u, p, 1.0 / lo) <= 1.0) {
        lo *= 0.25;
        if (++expand > 300) {
            // modular stays <= 1 down to denormal scale: numerically zero field
            return 0.0;
        }
    }

    // invariant: modular(u/lo) > 1 >= modular(u/hi)
    for (int it = 0; it < luxemburg_max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((hi - lo) <= tol * mid) return mid;
        if (modular_scaled(u, p, 1.0 / mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    if ((hi - lo) <= 16.0 * tol * hi) return 0.5 * (lo + hi);
    throw std::runtime_error("luxemburg norm: bisection did not converge");
}

double anisotropic_norm(const GridFunction& u, std::span<const GridFunction> grads,
                        const ExponentVector& pv, double tol) {
    if (grads.size() != static_cast<std::size_t>(pv.dim()))
        throw std::invalid_argument("need one partial per axis");
    double acc = luxemburg_norm(u, pv.p0(), tol);
    for (int i = 0; i < pv.dim(); ++i)
        acc += luxemburg_norm(grads[static_cast<std::size_t>(i)], pv.p(i), tol);
    return acc;
}

double anisotropic_norm(const GridFunction& u, const ExponentVector& pv, double tol) {
    const std::vector<GridFunction> grads = discrete_gradient(u);
    return anisotropic_norm(u, grads, pv, tol);
}

NormModularBound norm_modular_bound_check(const GridFunction& v, const ExponentField& p) {
    NormModularBound r{};
    r.lhs = luxemburg_norm(v, p);
    r.rhs = std::pow(modular(v, p) + 1.0, 1.0 / p.p_minus());
    r.holds = r.lhs <= r.rhs + 1e-10 * (1.0 + r.rhs);
    return r;
}

}  // namespace aniso
