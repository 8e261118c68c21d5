#include "aniso/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "aniso/kernels.hpp"
#include "aniso/modular.hpp"
#include "aniso/util.hpp"

namespace aniso {

namespace {

// int_0^s h_hat(r)/alpha dr
double weight_integral(const FluxModel& model, double s) {
    if (model.h_hat_const) return *model.h_hat_const * s / model.alpha;
    const int panels = 512;
    const double step = s / panels;
    double acc = 0.5 * (model.h_hat(0.0) + model.h_hat(s));
    for (int j = 1; j < panels; ++j) acc += model.h_hat(j * step);
    return acc * step / model.alpha;
}

}  // namespace

std::vector<EnergyEstimateRow> energy_estimate_check(const GridFunction& u,
                                                     const RegularizedProblem& rp,
                                                     std::span<const double> k_values) {
    const Grid& g = u.grid();
    const ExponentVector& pv = *rp.base->exponents;
    const FluxModel& model = rp.base->flux;
    const double vol = g.cell_volume();

    std::vector<EnergyEstimateRow> rows;
    rows.reserve(k_values.size());
    for (double k : k_values) {
        const GridFunction tk = truncate(u, k);
        double L = 0.0;
        for (int d = 0; d < g.dim(); ++d)
            L += modular(discrete_partial(tk, d), pv.p(d));
        double bulk = 0.0, tail = 0.0;
        for (std::size_t q = 0; q < g.total_nodes(); ++q) {
            const double a = std::abs(u[q]);
            if (a == 0.0) continue;
            const double weight = std::exp(weight_integral(model, a));
            if (a <= k)
                bulk += std::pow(a, pv.p0()[q]) * weight;
            else
                tail += std::pow(a, pv.p0()[q] - 1.0) * weight;
        }
        L += bulk * vol + k * tail * vol;
        rows.push_back({k, L, L / k});
    }
    return rows;
}

std::vector<MeasureDecayRow> measure_decay_check(const GridFunction& u, const ExponentVector& pv,
                                                 std::span<const double> k_values) {
    const ExponentField pbar = harmonic_mean_exponent(pv);
    const double pbar_minus = pbar.p_minus();
    const double vol = u.grid().cell_volume();
    std::vector<MeasureDecayRow> rows;
    rows.reserve(k_values.size());
    for (double k : k_values) {
        std::size_t count = 0;
        for (std::size_t q = 0; q < u.size(); ++q)
            if (std::abs(u[q]) > k) ++count;
        const double meas = static_cast<double>(count) * vol;
        rows.push_back({k, meas, meas * std::pow(k, pbar_minus - 1.0)});
    }
    return rows;
}

double entropy_residual(const GridFunction& u, const GridFunction& xi, double k,
                        const RegularizedProblem& rp) {
    require_same_box(u, xi);
    if (!(k > 0.0)) throw std::invalid_argument("truncation level must be positive");
    const Grid& g = u.grid();
    const int dim = g.dim();
    const double eps = rp.base->eps_flux;
    const ExponentField& p0 = rp.base->exponents->p0();
    const double vol = g.cell_volume();

    GridFunction v(u.grid_ptr());
    for (std::size_t q = 0; q < u.size(); ++q) v[q] = truncate(u[q] - xi[q], k);
    const std::vector<GridFunction> dv = discrete_gradient(v);
    const std::vector<GridFunction> du = discrete_gradient(u);

    std::vector<double> xig(static_cast<std::size_t>(dim));
    std::vector<double> a(static_cast<std::size_t>(dim));
    double lhs_grad = 0.0, lhs_zero = 0.0, rhs = 0.0;
    for (std::size_t q = 0; q < g.total_nodes(); ++q) {
        for (int d = 0; d < dim; ++d) xig[static_cast<std::size_t>(d)] = du[static_cast<std::size_t>(d)][q];
        rp.model_n.a(g, q, u[q], xig.data(), a.data());
        for (int d = 0; d < dim; ++d)
            lhs_grad += a[static_cast<std::size_t>(d)] * dv[static_cast<std::size_t>(d)][q];
        const double zo = rp.model_n.H(g, q, u[q], xig.data()) +
                          degenerate_power(u[q], p0[q], eps);
        lhs_zero += zo * v[q];
        rhs += rp.f_n[q] * v[q];
    }
    return (lhs_grad + lhs_zero - rhs) * vol;
}

double entropy_residual(const GridFunction& u, const GridFunction& xi, double k,
                        std::shared_ptr<const ProblemSpec> spec) {
    return entropy_residual(u, xi, k, make_regularized(std::move(spec), u.grid().active_radius()));
}

std::vector<double> monotonicity_gap(std::span<const GridFunction> u_seq,
                                     const GridFunction& u_limit, double k,
                                     const FluxModel& model, double R) {
    const Grid& g = u_limit.grid();
    const int dim = g.dim();
    const double vol = g.cell_volume();
    const GridFunction tk_lim = truncate(u_limit, k);
    const std::vector<GridFunction> d_lim = discrete_gradient(tk_lim);

    std::vector<double> gaps;
    gaps.reserve(u_seq.size());
    std::vector<double> xi_m(static_cast<std::size_t>(dim));
    std::vector<double> xi_l(static_cast<std::size_t>(dim));
    std::vector<double> a_m(static_cast<std::size_t>(dim));
    std::vector<double> a_l(static_cast<std::size_t>(dim));
    for (const GridFunction& um : u_seq) {
        require_same_box(um, u_limit);
        const GridFunction tk = truncate(um, k);
        const std::vector<GridFunction> d_m = discrete_gradient(tk);
        double gap = 0.0;
        for (std::size_t q = 0; q < g.total_nodes(); ++q) {
            if (!(g.node_radius(q) < R)) continue;
            for (int d = 0; d < dim; ++d) {
                xi_m[static_cast<std::size_t>(d)] = d_m[static_cast<std::size_t>(d)][q];
                xi_l[static_cast<std::size_t>(d)] = d_lim[static_cast<std::size_t>(d)][q];
            }
            const double s = tk[q];
            model.a(g, q, s, xi_m.data(), a_m.data());
            model.a(g, q, s, xi_l.data(), a_l.data());
            for (int d = 0; d < dim; ++d)
                gap += (a_m[static_cast<std::size_t>(d)] - a_l[static_cast<std::size_t>(d)]) *
                       (xi_m[static_cast<std::size_t>(d)] - xi_l[static_cast<std::size_t>(d)]);
        }
        gaps.push_back(gap * vol);
    }
    return gaps;
}

std::vector<EquiTailRow> equi_integrability_tail(const GridFunction& u, const ProblemSpec& spec,
                                                 std::span<const double> h_values) {
    const Grid& g = u.grid();
    const int dim = g.dim();
    const ExponentVector& pv = *spec.exponents;
    const double vol = g.cell_volume();
    const std::vector<GridFunction> du = discrete_gradient(u);

    std::vector<EquiTailRow> rows;
    rows.reserve(h_values.size());
    for (double h : h_values) {
        double lhs = 0.0, data = 0.0;
        for (std::size_t q = 0; q < g.total_nodes(); ++q) {
            const double a = std::abs(u[q]);
            if (a > h + 1.0) {
                double grad_part = 0.0;
                for (int d = 0; d < dim; ++d)
                    grad_part += std::pow(std::abs(du[static_cast<std::size_t>(d)][q]), pv.p(d)[q]);
                lhs += spec.flux.h_hat(a) * grad_part + std::pow(a, pv.p0()[q] - 1.0);
            }
            if (a > h) {
                double csum = 0.0;
                for (int d = 0; d < dim; ++d)
                    csum += std::abs(spec.flux.c[static_cast<std::size_t>(d)][q]);
                data += std::abs(spec.f[q]) + csum;
            }
        }
        rows.push_back({h, lhs * vol, data * vol});
    }
    return rows;
}

GridFunction make_bump(GridPtr grid, std::span<const double> center, double width,
                       double amplitude) {
    GridFunction b(grid);
    const int dim = grid->dim();
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (std::size_t q = 0; q < b.size(); ++q) {
        grid->node_coords(q, x.data());
        double prof = amplitude;
        for (int d = 0; d < dim; ++d) {
            const double t = (x[static_cast<std::size_t>(d)] - center[static_cast<std::size_t>(d)]) / width;
            if (std::abs(t) >= 1.0) {
                prof = 0.0;
                break;
            }
            const double w = 1.0 - t * t;
            prof *= w * w;
        }
        b[q] = prof;
    }
    return b;
}

std::vector<EntropyCase> entropy_sweep(const GridFunction& u, const RegularizedProblem& rp,
                                       std::span<const double> k_values, int n_random,
                                       std::uint64_t seed, double core_R) {
    std::vector<EntropyCase> cases;
    const GridFunction zero(u.grid_ptr());
    Rng rng(seed);
    const int dim = u.grid().dim();
    for (double k : k_values) {
        cases.push_back({"xi=0", k, entropy_residual(u, zero, k, rp)});
        cases.push_back({"xi=u", k, entropy_residual(u, u, k, rp)});
        for (int j = 0; j < n_random; ++j) {
            std::vector<double> center(static_cast<std::size_t>(dim));
            const double cr = std::max(core_R - 1.0, 0.5);
            for (int d = 0; d < dim; ++d)
                center[static_cast<std::size_t>(d)] = rng.uniform(-cr, cr) / std::sqrt(double(dim));
            const double width = rng.uniform(0.5, 1.0);
            const double amp = rng.uniform(-k, k);
            const GridFunction xi = make_bump(u.grid_ptr(), center, width, amp);
            cases.push_back({"bump" + std::to_string(j), k, entropy_residual(u, xi, k, rp)});
        }
    }
    return cases;
}

double core_diff_norm(const GridFunction& a, const GridFunction& b, double R, double p) {
    require_same_box(a, b);
    const Grid& g = a.grid();
    double acc = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) {
        if (!(g.node_radius(q) < R)) continue;
        acc += std::pow(std::abs(a[q] - b[q]), p);
    }
    return std::pow(acc * g.cell_volume(), 1.0 / p);
}

LadderReport ladder_study(std::shared_ptr<const ProblemSpec> spec, double core_R,
                          const SolverParams& params, std::span<const double> k_values,
                          std::span<const double> h_values, double gap_k, bool warm_start) {
    if (spec->radius_schedule.empty()) throw std::invalid_argument("empty radius schedule");
    if (!(core_R < spec->radius_schedule.front()))
        throw std::invalid_argument("core radius must stay below the first rung");

    const ExponentField pbar = harmonic_mean_exponent(*spec->exponents);
    const double pbar_minus = pbar.p_minus();

    LadderReport rep;
    rep.core_radius = core_R;
    GridFunction prev;
    for (double n : spec->radius_schedule) {
        RungRecord rung;
        rung.n = n;
        const RegularizedProblem rp = make_regularized(spec, n);
        GridFunction u0 = (warm_start && prev.size() > 0) ? prev : GridFunction(rp.grid, 0.0);
        auto [u, report] = solve(rp, u0, params);
        rung.report = report;
        if (!report.converged) rep.all_converged = false;
        rung.energy = energy_estimate_check(u, rp, k_values);
        rung.decay = measure_decay_check(u, *spec->exponents, k_values);
        rung.equi = equi_integrability_tail(u, *spec, h_values);
        for (const EnergyEstimateRow& r : rung.energy)
            rung.estimate_constant = std::max(rung.estimate_constant, r.L_over_k);
        rep.estimate_constants.push_back(rung.estimate_constant);
        rep.radii.push_back(n);
        if (prev.size() > 0)
            rep.diffs.push_back(core_diff_norm(u, prev, core_R, pbar_minus));
        prev = u;
        rung.solution = std::move(u);
        rep.rungs.push_back(std::move(rung));
    }
    rep.decay_table = rep.rungs.back().decay;

    const GridFunction& finest = rep.rungs.back().solution;
    std::vector<GridFunction> seq;
    for (std::size_t j = 0; j + 1 < rep.rungs.size(); ++j) seq.push_back(rep.rungs[j].solution);
    if (!seq.empty())
        rep.gap_vs_finest = monotonicity_gap(seq, finest, gap_k, spec->flux, core_R);
    return rep;
}

}  // namespace aniso
