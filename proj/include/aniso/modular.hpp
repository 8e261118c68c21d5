#pragma once

#include <span>

#include "aniso/exponents.hpp"
#include "aniso/grid.hpp"

namespace aniso {

inline constexpr double luxemburg_default_tol = 1e-12;
inline constexpr int luxemburg_max_iterations = 200;

// Node-sum quadrature of |u(x)|^{p(x)}; zero iff u vanishes.
double modular(const GridFunction& u, const ExponentField& p);

// Smallest lambda with modular(u/lambda) <= 1, by bracketing + bisection to
// relative tolerance tol. Zero fields short-circuit to 0. Throws if the
// bracket search or bisection fails to converge.
double luxemburg_norm(const GridFunction& u, const ExponentField& p,
                      double tol = luxemburg_default_tol);

// ||u||_{p0} + sum_i ||D^i u||_{p_i} with the supplied partials.
double anisotropic_norm(const GridFunction& u, std::span<const GridFunction> grads,
                        const ExponentVector& pv, double tol = luxemburg_default_tol);
// Convenience overload computing the discrete gradient.
double anisotropic_norm(const GridFunction& u, const ExponentVector& pv,
                        double tol = luxemburg_default_tol);

// ||v||_p against the elementary bound (modular(v,p)+1)^{1/p^-}.
struct NormModularBound {
    double lhs;
    double rhs;
    bool holds;
};
NormModularBound norm_modular_bound_check(const GridFunction& v, const ExponentField& p);

}  // namespace aniso
