#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "aniso/flux.hpp"
#include "aniso/grid.hpp"

namespace aniso {

// One rung of the domain ladder: data regularized at level n and restricted
// to the active ball of radius n.
struct RegularizedProblem {
    std::shared_ptr<const ProblemSpec> base;
    double n = 0.0;
    GridPtr grid;  // same box as the problem grid, active radius n
    GridFunction f_n;
    FluxModel model_n;  // truncated flux, truncated + localized lower order
};

// f/(1 + |f|/n) on the ball of radius n, 0 outside.
GridFunction regularize_source(const GridFunction& f, double n);

RegularizedProblem make_regularized(std::shared_ptr<const ProblemSpec> spec, double n);

// Nodewise strong-form residual
//   F(u) = -div_h a(x, T_n u, grad_h u) + H_n(x,u,grad_h u)
//          + (u^2+eps^2)^{(p0-2)/2} u - f_n
// on active nodes, zero elsewhere. div_h is the negative transpose of the
// forward-difference gradient, so <F(u), v> equals the discrete weak form
// for every v supported in the active ball, and F is the exact gradient of
// discrete_energy (per unit cell volume) for the built-in gradient flux.
GridFunction assemble_residual(const GridFunction& u, const RegularizedProblem& rp);

struct SolverParams {
    double tol = 1e-10;
    int max_iter = 200;
    double damping_floor = 1e-4;
    double cg_tol_factor = 1e-2;    // cg tolerance = factor * tol (relative residual)
    long cg_iter_factor = 10;       // iteration cap = factor * active nodes
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;  // dual-norm residuals of accepted iterates
    double final_residual = 0.0;
    double damping_used = 1.0;  // smallest accepted step factor
    bool converged = false;
    long cg_iterations_total = 0;
    std::string note;
};

// Damped lagged-coefficient iteration: freeze the diffusion weights, the
// zero-order factor and the lower-order term at the current iterate, solve
// the SPD system by diagonally preconditioned CG, then backtrack the step
// until the dual-norm residual does not increase. Non-convergence is
// reported, not thrown.
std::pair<GridFunction, SolveReport> solve(const RegularizedProblem& rp, const GridFunction& u0,
                                           const SolverParams& params = {});

// The convex energy whose Euler-Lagrange system is assemble_residual = 0 in
// the variational subcase (built-in flux, H = 0):
//   J(u) = sum_i int phi_i(D^i u) + int phi_0(u) - int f_n u,
//   phi(t; p, eps) = ((t^2+eps^2)^{p/2} - eps^p)/p.
double discrete_energy(const GridFunction& u, const RegularizedProblem& rp);

// cell_volume * assemble_residual: the exact gradient of discrete_energy.
GridFunction energy_gradient(const GridFunction& u, const RegularizedProblem& rp);

struct OracleReport {
    int iterations = 0;
    double final_residual_max = 0.0;
    bool converged = false;
};

// Independent route to the variational solution: descent on discrete_energy
// with backtracking line search (Barzilai-Borwein trial steps), stopping
// when max |assemble_residual| <= tol.
std::pair<GridFunction, OracleReport> energy_oracle(const RegularizedProblem& rp, double tol,
                                                    int max_iter = 500000);

}  // namespace aniso
