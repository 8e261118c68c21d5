#include "aniso/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "aniso/kernels.hpp"
#include "aniso/modular.hpp"

namespace aniso {

GridFunction regularize_source(const GridFunction& f, double n) {
    if (!(n > 0.0)) throw std::invalid_argument("regularization level must be positive");
    const Grid& g = f.grid();
    GridFunction out(f.grid_ptr());
    for (std::size_t q = 0; q < f.size(); ++q) {
        if (g.node_radius(q) < n) out[q] = f[q] / (1.0 + std::abs(f[q]) / n);
    }
    return out;
}

RegularizedProblem make_regularized(std::shared_ptr<const ProblemSpec> spec, double n) {
    if (!(n > 0.0) || n > spec->grid->extent())
        throw std::invalid_argument("rung radius must lie in (0, extent]");
    RegularizedProblem rp;
    rp.base = spec;
    rp.n = n;
    rp.grid = with_active_radius(*spec->grid, n);
    GridFunction fn = regularize_source(spec->f, n);
    rp.f_n = GridFunction(rp.grid, std::vector<double>(fn.data(), fn.data() + fn.size()));
    rp.model_n = regularize_lower_order(truncated_flux(spec->flux, n), n);
    return rp;
}

namespace {

// a_i(x, s, grad u) sampled at every box node, one field per component.
std::vector<GridFunction> flux_fields(const GridFunction& u, const RegularizedProblem& rp) {
    const Grid& g = u.grid();
    const int dim = g.dim();
    const std::vector<GridFunction> grads = discrete_gradient(u);
    std::vector<GridFunction> a(static_cast<std::size_t>(dim), GridFunction(u.grid_ptr()));
    std::vector<double> xi(static_cast<std::size_t>(dim));
    std::vector<double> out(static_cast<std::size_t>(dim));
    for (std::size_t q = 0; q < g.total_nodes(); ++q) {
        for (int d = 0; d < dim; ++d) xi[static_cast<std::size_t>(d)] = grads[static_cast<std::size_t>(d)][q];
        rp.model_n.a(g, q, u[q], xi.data(), out.data());
        for (int d = 0; d < dim; ++d) a[static_cast<std::size_t>(d)][q] = out[static_cast<std::size_t>(d)];
    }
    return a;
}

GridFunction lower_order_field(const GridFunction& u, const RegularizedProblem& rp) {
    const Grid& g = u.grid();
    const int dim = g.dim();
    const std::vector<GridFunction> grads = discrete_gradient(u);
    GridFunction h(u.grid_ptr());
    std::vector<double> xi(static_cast<std::size_t>(dim));
    for (const ActiveSpan& s : g.active_spans()) {
        for (std::size_t q = s.offset; q < s.offset + s.length; ++q) {
            for (int d = 0; d < dim; ++d)
                xi[static_cast<std::size_t>(d)] = grads[static_cast<std::size_t>(d)][q];
            h[q] = rp.model_n.H(g, q, u[q], xi.data());
        }
    }
    return h;
}

}  // namespace

GridFunction assemble_residual(const GridFunction& u, const RegularizedProblem& rp) {
    const Grid& g = u.grid();
    const int dim = g.dim();
    const double inv_h = 1.0 / g.mesh();
    const double eps = rp.base->eps_flux;
    const ExponentField& p0 = rp.base->exponents->p0();
    const std::vector<GridFunction> a = flux_fields(u, rp);
    const GridFunction h = lower_order_field(u, rp);

    GridFunction res(u.grid_ptr());
    std::vector<double> xi(static_cast<std::size_t>(dim));
    for (const ActiveSpan& s : g.active_spans()) {
        for (std::size_t q = s.offset; q < s.offset + s.length; ++q) {
            double div = 0.0;
            for (int d = 0; d < dim; ++d) {
                const std::size_t st = static_cast<std::size_t>(g.stride(d));
                div += (a[static_cast<std::size_t>(d)][q] - a[static_cast<std::size_t>(d)][q - st]) * inv_h;
            }
            res[q] = -div + h[q] + degenerate_power(u[q], p0[q], eps) - rp.f_n[q];
        }
    }
    return res;
}

namespace {

double dual_residual_norm(const GridFunction& res, const ExponentField& p0_conj) {
    return luxemburg_norm(res, p0_conj);
}

// Diagonally preconditioned CG for the lagged SPD operator
//   (L u)(q) = z(q) u(q) + sum_d (w_d(q)(u(q)-u(q+e_d)) + w_d(q-e_d)(u(q)-u(q-e_d)))/h^2.
struct CgResult {
    long iterations = 0;
    bool converged = false;
};

CgResult cg_solve(const Grid& g, const std::vector<GridFunction>& w, const GridFunction& z,
                  const GridFunction& b, GridFunction& x, double rel_tol, long max_iter) {
    const auto& k = kernels::active();
    const std::size_t n = g.total_nodes();
    const int dim = g.dim();

    kernels::StencilArgs args{};
    args.z = z.data();
    args.dim = dim;
    args.inv_h2 = 1.0 / (g.mesh() * g.mesh());
    for (int d = 0; d < dim; ++d) {
        args.w[d] = w[static_cast<std::size_t>(d)].data();
        args.stride[d] = g.stride(d);
    }
    auto apply = [&](const GridFunction& in, GridFunction& out) {
        args.u = in.data();
        args.out = out.data();
        for (const ActiveSpan& s : g.active_spans()) k.stencil_row(args, s.offset, s.length);
    };

    // Jacobi preconditioner
    GridFunction dinv(x.grid_ptr());
    for (const ActiveSpan& s : g.active_spans()) {
        for (std::size_t q = s.offset; q < s.offset + s.length; ++q) {
            double diag = z[q];
            for (int d = 0; d < dim; ++d) {
                const std::size_t st = static_cast<std::size_t>(g.stride(d));
                diag += (w[static_cast<std::size_t>(d)][q] + w[static_cast<std::size_t>(d)][q - st]) * args.inv_h2;
            }
            dinv[q] = 1.0 / diag;
        }
    }

    GridFunction r(x.grid_ptr()), zv(x.grid_ptr()), p(x.grid_ptr()), ap(x.grid_ptr());
    apply(x, r);
    // r = b - L x on the active set
    for (const ActiveSpan& s : g.active_spans())
        for (std::size_t q = s.offset; q < s.offset + s.length; ++q) r[q] = b[q] - r[q];

    const double b_norm = std::sqrt(k.dot(b.data(), b.data(), n));
    const double stop = rel_tol * b_norm;
    CgResult cg;
    double r_norm = std::sqrt(k.dot(r.data(), r.data(), n));
    if (r_norm <= stop || r_norm == 0.0) {
        cg.converged = true;
        return cg;
    }
    k.ewise_mul(r.data(), dinv.data(), zv.data(), n);
    p = zv;
    double rz = k.dot(r.data(), zv.data(), n);
    for (long it = 0; it < max_iter; ++it) {
        apply(p, ap);
        const double pap = k.dot(p.data(), ap.data(), n);
        if (!(pap > 0.0)) throw std::runtime_error("cg: operator lost positive definiteness");
        const double alpha = rz / pap;
        k.axpy(alpha, p.data(), x.data(), n);
        k.axpy(-alpha, ap.data(), r.data(), n);
        ++cg.iterations;
        r_norm = std::sqrt(k.dot(r.data(), r.data(), n));
        if (r_norm <= stop) {
            cg.converged = true;
            return cg;
        }
        k.ewise_mul(r.data(), dinv.data(), zv.data(), n);
        const double rz_new = k.dot(r.data(), zv.data(), n);
        k.axpby(1.0, zv.data(), rz_new / rz, p.data(), n);
        rz = rz_new;
    }
    return cg;
}

}  // namespace

std::pair<GridFunction, SolveReport> solve(const RegularizedProblem& rp, const GridFunction& u0,
                                           const SolverParams& params) {
    const Grid& g = *rp.grid;
    const int dim = g.dim();
    const double eps = rp.base->eps_flux;
    const ExponentField p0_conj = conjugate(rp.base->exponents->p0());

    if (!u0.grid().same_box(g)) throw std::invalid_argument("initial iterate box mismatch");
    // rebind onto the rung grid so the active set is this rung's ball
    GridFunction u(rp.grid, std::vector<double>(u0.data(), u0.data() + u0.size()));
    u.enforce_dirichlet();

    SolveReport rep;
    GridFunction res = assemble_residual(u, rp);
    double res_norm = dual_residual_norm(res, p0_conj);
    rep.residual_history.push_back(res_norm);

    const long cg_cap = params.cg_iter_factor * static_cast<long>(g.active_count()) + 100;
    for (int it = 0; it < params.max_iter && res_norm > params.tol; ++it) {
        // freeze coefficients at the current iterate
        const std::vector<GridFunction> grads = discrete_gradient(u);
        std::vector<GridFunction> w(static_cast<std::size_t>(dim), GridFunction(u.grid_ptr()));
        for (int d = 0; d < dim; ++d) {
            const ExponentField& pd = rp.base->exponents->p(d);
            for (std::size_t q = 0; q < g.total_nodes(); ++q) {
                const double t = grads[static_cast<std::size_t>(d)][q];
                w[static_cast<std::size_t>(d)][q] = std::pow(t * t + eps * eps, 0.5 * (pd[q] - 2.0));
            }
        }
        GridFunction z(u.grid_ptr());
        const ExponentField& p0 = rp.base->exponents->p0();
        for (const ActiveSpan& s : g.active_spans())
            for (std::size_t q = s.offset; q < s.offset + s.length; ++q)
                z[q] = std::pow(u[q] * u[q] + eps * eps, 0.5 * (p0[q] - 2.0));

        const GridFunction h = lower_order_field(u, rp);
        GridFunction rhs(u.grid_ptr());
        for (const ActiveSpan& s : g.active_spans())
            for (std::size_t q = s.offset; q < s.offset + s.length; ++q)
                rhs[q] = rp.f_n[q] - h[q];

        GridFunction u_hat(u);
        CgResult cg;
        try {
            cg = cg_solve(g, w, z, rhs, u_hat, params.cg_tol_factor * params.tol, cg_cap);
        } catch (const std::runtime_error& e) {
            rep.note = e.what();
            break;
        }
        rep.cg_iterations_total += cg.iterations;
        if (!cg.converged) {
            rep.note = "cg: iteration cap reached";
            break;
        }

        // backtrack until the residual norm does not increase
        double theta = 1.0;
        bool accepted = false;
        GridFunction trial(u.grid_ptr());
        while (theta >= params.damping_floor) {
            for (std::size_t q = 0; q < g.total_nodes(); ++q)
                trial[q] = u[q] + theta * (u_hat[q] - u[q]);
            GridFunction res_trial = assemble_residual(trial, rp);
            const double trial_norm = dual_residual_norm(res_trial, p0_conj);
            if (trial_norm <= res_norm) {
                u = trial;
                res_norm = trial_norm;
                rep.residual_history.push_back(res_norm);
                rep.damping_used = std::min(rep.damping_used, theta);
                ++rep.iterations;
                accepted = true;
                break;
            }
            theta *= 0.5;
        }
        if (!accepted) {
            rep.note = "damping line search hit the floor";
            break;
        }
    }

    rep.final_residual = res_norm;
    rep.converged = res_norm <= params.tol;
    return {std::move(u), std::move(rep)};
}

double discrete_energy(const GridFunction& u, const RegularizedProblem& rp) {
    const Grid& g = u.grid();
    const int dim = g.dim();
    const double eps = rp.base->eps_flux;
    const ExponentVector& pv = *rp.base->exponents;
    const std::vector<GridFunction> grads = discrete_gradient(u);

    auto phi = [eps](double t, double p) {
        if (eps == 0.0) return std::pow(std::abs(t), p) / p;
        return (std::pow(t * t + eps * eps, 0.5 * p) - std::pow(eps, p)) / p;
    };

    double acc = 0.0;
    for (std::size_t q = 0; q < g.total_nodes(); ++q) {
        double node = phi(u[q], pv.p0()[q]) - rp.f_n[q] * u[q];
        for (int d = 0; d < dim; ++d)
            node += phi(grads[static_cast<std::size_t>(d)][q], pv.p(d)[q]);
        acc += node;
    }
    return acc * g.cell_volume();
}

GridFunction energy_gradient(const GridFunction& u, const RegularizedProblem& rp) {
    GridFunction grad = assemble_residual(u, rp);
    const double vol = u.grid().cell_volume();
    for (std::size_t q = 0; q < grad.size(); ++q) grad[q] *= vol;
    return grad;
}

std::pair<GridFunction, OracleReport> energy_oracle(const RegularizedProblem& rp, double tol,
                                                    int max_iter) {
    const Grid& g = *rp.grid;
    const auto& k = kernels::active();
    const std::size_t n = g.total_nodes();

    GridFunction u(rp.grid, 0.0);
    GridFunction grad = energy_gradient(u, rp);
    double J = discrete_energy(u, rp);

    OracleReport rep;
    GridFunction u_prev(rp.grid, 0.0), grad_prev(rp.grid, 0.0), trial(rp.grid, 0.0);
    double step = 1.0;
    bool have_prev = false;

    for (int it = 0; it < max_iter; ++it) {
        rep.final_residual_max = grad.max_abs() / g.cell_volume();
        if (rep.final_residual_max <= tol) {
            rep.converged = true;
            rep.iterations = it;
            return {std::move(u), rep};
        }
        if (have_prev) {
            // Barzilai-Borwein trial step from the last displacement pair
            double ss = 0.0, sy = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                const double s = u[q] - u_prev[q];
                const double y = grad[q] - grad_prev[q];
                ss += s * s;
                sy += s * y;
            }
            if (sy > 0.0) step = std::min(std::max(ss / sy, 1e-12), 1e12);
        }
        const double g2 = k.dot(grad.data(), grad.data(), n);
        double t = step;
        bool ok = false;
        GridFunction grad_trial(rp.grid, 0.0);
        for (int bt = 0; bt < 80; ++bt) {
            trial = u;
            k.axpy(-t, grad.data(), trial.data(), n);
            const double Jt = discrete_energy(trial, rp);
            if (Jt <= J - 1e-4 * t * g2) {
                ok = true;
                grad_trial = energy_gradient(trial, rp);
                break;
            }
            // near the minimum the energy comparison drowns in rounding;
            // a plain gradient-norm decrease still certifies progress
            grad_trial = energy_gradient(trial, rp);
            if (k.dot(grad_trial.data(), grad_trial.data(), n) <= (1.0 - 1e-9) * g2) {
                ok = true;
                break;
            }
            t *= 0.5;
        }
        if (!ok) break;  // flat to machine precision
        u_prev = u;
        grad_prev = grad;
        u = trial;
        J = discrete_energy(u, rp);
        grad = grad_trial;
        step = t;
        have_prev = true;
        rep.iterations = it + 1;
    }
    rep.final_residual_max = grad.max_abs() / g.cell_volume();
    rep.converged = rep.final_residual_max <= tol;
    return {std::move(u), rep};
}

}  // namespace aniso
