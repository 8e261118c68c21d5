#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aniso/solver.hpp"

namespace aniso {

// Exponentially weighted level-set energy of a candidate solution:
//   L(k) = sum_i modular(D^i T_k u, p_i)
//        + int_{|u|<=k} |u|^{p0} e^{A(|u|)} + k int_{|u|>k} |u|^{p0-1} e^{A(|u|)},
//   A(s) = int_0^s h_hat(r)/alpha dr  (closed form for constant h_hat,
//   composite trapezoid otherwise).
// L(k)/k stays bounded by a data constant on solver outputs.
struct EnergyEstimateRow {
    double k;
    double L;
    double L_over_k;
};
std::vector<EnergyEstimateRow> energy_estimate_check(const GridFunction& u,
                                                     const RegularizedProblem& rp,
                                                     std::span<const double> k_values);

// meas{|u|>k} and its k^{pbar^- - 1} scaling; the scaled column stays
// bounded on solver outputs.
struct MeasureDecayRow {
    double k;
    double meas;
    double scaled;
};
std::vector<MeasureDecayRow> measure_decay_check(const GridFunction& u, const ExponentVector& pv,
                                                 std::span<const double> k_values);

// LHS - RHS of the truncated entropy inequality for the rung data:
//   int a(x,u,grad u) . grad T_k(u-xi) + int (H_n + |u|^{p0-2}u) T_k(u-xi)
//     <= int f_n T_k(u-xi),
// assembled with the discrete gradient and node-sum quadrature. Nonpositive
// up to solver accuracy for rung solutions.
double entropy_residual(const GridFunction& u, const GridFunction& xi, double k,
                        const RegularizedProblem& rp);
// Convenience overload: derives the rung level from the active radius of u's grid.
double entropy_residual(const GridFunction& u, const GridFunction& xi, double k,
                        std::shared_ptr<const ProblemSpec> spec);

// Minty gap between each member of u_seq and u_limit on the ball of radius R:
//   sum_i int_{B_R} (a_i(x,T_k u, grad T_k u) - a_i(x,T_k u, grad T_k u_lim))
//                   (D^i T_k u - D^i T_k u_lim).
// Nonnegative by strict monotonicity; decays to 0 along a converging ladder.
std::vector<double> monotonicity_gap(std::span<const GridFunction> u_seq,
                                     const GridFunction& u_limit, double k,
                                     const FluxModel& model, double R);

// Equi-integrability tails:
//   tail_lhs(h) = sum_i int_{|u|>h+1} h_hat(|u|) |D^i u|^{p_i} + int_{|u|>h+1} |u|^{p0-1},
//   data_tail(h) = int_{|u|>h} (|f| + sum_i |c_i|).
struct EquiTailRow {
    double h;
    double tail_lhs;
    double data_tail;
};
std::vector<EquiTailRow> equi_integrability_tail(const GridFunction& u, const ProblemSpec& spec,
                                                 std::span<const double> h_values);

// Compactly supported product-bump test function with |values| <= |amplitude|.
GridFunction make_bump(GridPtr grid, std::span<const double> center, double width,
                       double amplitude);

struct EntropyCase {
    std::string label;
    double k;
    double residual;
};
// xi = 0, xi = u, and n_random seeded bumps centered inside the ball of
// radius core_R - 1, for each k.
std::vector<EntropyCase> entropy_sweep(const GridFunction& u, const RegularizedProblem& rp,
                                       std::span<const double> k_values, int n_random,
                                       std::uint64_t seed, double core_R);

struct RungRecord {
    double n = 0.0;
    SolveReport report;
    GridFunction solution;
    std::vector<EnergyEstimateRow> energy;
    std::vector<MeasureDecayRow> decay;
    std::vector<EquiTailRow> equi;
    double estimate_constant = 0.0;  // max_k L(k)/k
};

struct LadderReport {
    std::vector<double> radii;
    double core_radius = 0.0;
    std::vector<double> diffs;               // ||u_{j+1}-u_j|| on the core ball, size rungs-1
    std::vector<double> estimate_constants;  // per rung
    std::vector<MeasureDecayRow> decay_table;  // finest rung
    std::vector<double> gap_vs_finest;         // per non-finest rung
    std::vector<RungRecord> rungs;
    bool all_converged = true;
};

// Solve every rung of spec.radius_schedule on the shared box (warm-started),
// record core-ball diffs in the constant-exponent pbar^- node-sum norm and
// all diagnostic tables.
LadderReport ladder_study(std::shared_ptr<const ProblemSpec> spec, double core_R,
                          const SolverParams& params, std::span<const double> k_values,
                          std::span<const double> h_values, double gap_k = 4.0,
                          bool warm_start = true);

// Restriction norm used for the ladder diffs.
double core_diff_norm(const GridFunction& a, const GridFunction& b, double R, double p);

}  // namespace aniso
