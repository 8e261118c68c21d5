#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aniso/exponents.hpp"
#include "aniso/grid.hpp"

namespace aniso {

// Caratheodory data of the operator: gradient flux a_i(x,s,xi), lower-order
// term H(x,s,xi), and the declared growth envelope (a_hat_i, h_hat, h0, c_i,
// alpha) the hypothesis checks test against. Spatial evaluation happens at
// grid nodes; exponents and L1 weights are node-sampled.
struct FluxModel {
    int dim = 0;
    std::function<void(const Grid&, std::size_t node, double s, const double* xi, double* out)> a;
    std::function<double(const Grid&, std::size_t node, double s, const double* xi)> H;
    std::vector<std::function<double(double)>> a_hat;
    std::function<double(double)> h_hat;
    std::optional<double> h_hat_const;  // set when h_hat is constant (closed-form weight integral)
    GridFunction h0;
    std::vector<GridFunction> c;
    double alpha = 1.0;
};

// Full problem description.
struct ProblemSpec {
    GridPtr grid;  // box grid; rungs re-derive the active ball
    std::shared_ptr<const ExponentVector> exponents;
    FluxModel flux;
    GridFunction f;
    std::vector<double> radius_schedule;
    double eps_flux = 1e-8;
};

// sign(s)(s^2+eps^2)^{(p-2)/2}|s| evaluated without the 0^negative pitfall.
double degenerate_power(double s, double p, double eps);

// a_i(x,s,xi) = (xi_i^2+eps^2)^{(p_i(x)-2)/2} xi_i, H = 0. Coercive with
// alpha = 1 (tight at eps = 0), growth envelope a_hat = 1, c = 0, h_hat = 1.
FluxModel model_anisotropic_laplacian(std::shared_ptr<const ExponentVector> pv, double eps);

// Same flux plus H(x,s,xi) = gamma sin(s) sum_i |xi_i|^{q(x)} + h0(x); breaks
// the sign condition while keeping the growth bound with h_hat = |gamma|+1.
FluxModel model_nonsign_lower_order(std::shared_ptr<const ExponentVector> pv, double eps,
                                    double gamma, ExponentField q, GridFunction h0);

// a_i = -xi_i: violates coercivity at every nonzero gradient. Exists so the
// hypothesis verifier has a known-bad reference.
FluxModel model_broken_sign(std::shared_ptr<const ExponentVector> pv);

// s -> T_n(s) inside the flux; H and the growth data pass through.
FluxModel truncated_flux(const FluxModel& model, double n);

// H -> T_n(H) restricted to the ball of radius n.
FluxModel regularize_lower_order(const FluxModel& model, double n);

// Seeded sampling check of the four structural hypotheses. Violations are
// reported, never thrown.
struct HypothesisCheck {
    std::string name;
    long violations = 0;
    double worst_margin = 0.0;  // positive = amount by which the worst sample failed
};
struct HypothesisReport {
    long samples = 0;
    HypothesisCheck growth;        // |a_i| against the declared envelope
    HypothesisCheck monotonicity;  // (a(xi)-a(xi*)).(xi-xi*) > 0
    HypothesisCheck coercivity;    // a(xi).xi >= alpha sum |xi_i|^{p_i}
    HypothesisCheck lower_order;   // |H| against h_hat, h0
};
HypothesisReport verify_hypotheses(const FluxModel& model, const ExponentVector& pv,
                                   long samples, std::uint64_t seed);

}  // namespace aniso
