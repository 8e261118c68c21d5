#include "aniso/flux.hpp"

#include <cmath>
#include <limits>

#include "aniso/util.hpp"

namespace aniso {

double degenerate_power(double s, double p, double eps) {
    if (eps == 0.0) {
        const double mag = std::pow(std::abs(s), p - 1.0);
        return s > 0.0 ? mag : (s < 0.0 ? -mag : 0.0);
    }
    return std::pow(s * s + eps * eps, 0.5 * (p - 2.0)) * s;
}

namespace {

GridFunction zero_field(const std::shared_ptr<const ExponentVector>& pv) {
    return GridFunction(pv->p0().grid_ptr(), 0.0);
}

std::vector<GridFunction> zero_fields(const std::shared_ptr<const ExponentVector>& pv) {
    return std::vector<GridFunction>(static_cast<std::size_t>(pv->dim()),
                                     zero_field(pv));
}

void fill_envelope(FluxModel& m, const std::shared_ptr<const ExponentVector>& pv) {
    m.a_hat.assign(static_cast<std::size_t>(pv->dim()), [](double) { return 1.0; });
    m.h_hat = [](double) { return 1.0; };
    m.h_hat_const = 1.0;
    m.h0 = zero_field(pv);
    m.c = zero_fields(pv);
    m.alpha = 1.0;
}

}  // namespace

FluxModel model_anisotropic_laplacian(std::shared_ptr<const ExponentVector> pv, double eps) {
    FluxModel m;
    m.dim = pv->dim();
    m.a = [pv, eps](const Grid&, std::size_t node, double, const double* xi, double* out) {
        for (int i = 0; i < pv->dim(); ++i) out[i] = degenerate_power(xi[i], pv->p(i)[node], eps);
    };
    m.H = [](const Grid&, std::size_t, double, const double*) { return 0.0; };
    fill_envelope(m, pv);
    return m;
}

FluxModel model_nonsign_lower_order(std::shared_ptr<const ExponentVector> pv, double eps,
                                    double gamma, ExponentField q, GridFunction h0) {
    FluxModel m = model_anisotropic_laplacian(pv, eps);
    const int dim = pv->dim();
    auto qs = std::make_shared<const ExponentField>(std::move(q));
    auto h0s = std::make_shared<const GridFunction>(std::move(h0));
    m.H = [dim, gamma, qs, h0s](const Grid&, std::size_t node, double s, const double* xi) {
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) acc += std::pow(std::abs(xi[i]), (*qs)[node]);
        return gamma * std::sin(s) * acc + (*h0s)[node];
    };
    m.h_hat = [gamma](double) { return std::abs(gamma) + 1.0; };
    m.h_hat_const = std::abs(gamma) + 1.0;
    m.h0 = *h0s;
    return m;
}

FluxModel model_broken_sign(std::shared_ptr<const ExponentVector> pv) {
    FluxModel m = model_anisotropic_laplacian(pv, 0.0);
    const int dim = pv->dim();
    m.a = [dim](const Grid&, std::size_t, double, const double* xi, double* out) {
        for (int i = 0; i < dim; ++i) out[i] = -xi[i];
    };
    return m;
}

FluxModel truncated_flux(const FluxModel& model, double n) {
    FluxModel m = model;
    m.a = [inner = model.a, n](const Grid& g, std::size_t node, double s, const double* xi,
                               double* out) { inner(g, node, truncate(s, n), xi, out); };
    return m;
}

FluxModel regularize_lower_order(const FluxModel& model, double n) {
    FluxModel m = model;
    m.H = [inner = model.H, n](const Grid& g, std::size_t node, double s, const double* xi) {
        if (!(g.node_radius(node) < n)) return 0.0;
        return truncate(inner(g, node, s, xi), n);
    };
    return m;
}

HypothesisReport verify_hypotheses(const FluxModel& model, const ExponentVector& pv,
                                   long samples, std::uint64_t seed) {
    const Grid& g = pv.grid();
    const int dim = pv.dim();
    const double L = g.extent();
    const int m_nodes = g.nodes_per_axis();
    const double tol_rel = 1e-9;

    HypothesisReport rep;
    rep.samples = samples;
    rep.growth.name = "growth";
    rep.monotonicity.name = "strict_monotonicity";
    rep.coercivity.name = "coercivity";
    rep.lower_order.name = "lower_order_growth";
    rep.growth.worst_margin = rep.monotonicity.worst_margin = rep.coercivity.worst_margin =
        rep.lower_order.worst_margin = -std::numeric_limits<double>::infinity();

    Rng rng(seed);
    std::vector<double> xi(static_cast<std::size_t>(dim));
    std::vector<double> xi_star(static_cast<std::size_t>(dim));
    std::vector<double> a_xi(static_cast<std::size_t>(dim));
    std::vector<double> a_star(static_cast<std::size_t>(dim));
    std::vector<int> idx(static_cast<std::size_t>(dim));

    for (long it = 0; it < samples; ++it) {
        for (int d = 0; d < dim; ++d) {
            const double x = rng.uniform(-L, L);
            int j = static_cast<int>(std::lround((x + L) / g.mesh()));
            j = std::max(0, std::min(m_nodes - 1, j));
            idx[static_cast<std::size_t>(d)] = j;
        }
        const std::size_t node = g.node_index(idx);
        const double s = rng.uniform(-10.0, 10.0);
        for (int d = 0; d < dim; ++d) {
            xi[static_cast<std::size_t>(d)] = rng.uniform(-5.0, 5.0);
            xi_star[static_cast<std::size_t>(d)] = rng.uniform(-5.0, 5.0);
        }

        model.a(g, node, s, xi.data(), a_xi.data());
        model.a(g, node, s, xi_star.data(), a_star.data());

        double base = 0.0;  // sum_j |xi_j|^{p_j(x)}
        for (int i = 0; i < dim; ++i)
            base += std::pow(std::abs(xi[static_cast<std::size_t>(i)]), pv.p(i)[node]);

        // growth of each component against the declared envelope
        for (int i = 0; i < dim; ++i) {
            const double pi = pv.p(i)[node];
            const double pconj = pi / (pi - 1.0);
            const double rhs = model.a_hat[static_cast<std::size_t>(i)](std::abs(s)) *
                               (std::pow(base, 1.0 / pconj) +
                                model.c[static_cast<std::size_t>(i)][node]);
            const double margin = std::abs(a_xi[static_cast<std::size_t>(i)]) - rhs;
            rep.growth.worst_margin = std::max(rep.growth.worst_margin, margin);
            if (margin > tol_rel * std::max(1.0, std::abs(rhs))) ++rep.growth.violations;
        }

        // strict monotonicity of the gradient map, summed over components
        bool distinct = false;
        double gap = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double d = xi[static_cast<std::size_t>(i)] - xi_star[static_cast<std::size_t>(i)];
            if (d != 0.0) distinct = true;
            gap += (a_xi[static_cast<std::size_t>(i)] - a_star[static_cast<std::size_t>(i)]) * d;
        }
        if (distinct) {
            rep.monotonicity.worst_margin = std::max(rep.monotonicity.worst_margin, -gap);
            if (!(gap > 0.0)) ++rep.monotonicity.violations;
        }

        // coercivity with the declared alpha
        double pairing = 0.0;
        for (int i = 0; i < dim; ++i)
            pairing += a_xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
        const double coer_rhs = model.alpha * base;
        const double coer_margin = coer_rhs - pairing;
        rep.coercivity.worst_margin = std::max(rep.coercivity.worst_margin, coer_margin);
        if (coer_margin > tol_rel * std::max(1.0, coer_rhs)) ++rep.coercivity.violations;

        // lower-order growth
        double conj_sum = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double pi = pv.p(i)[node];
            conj_sum += std::pow(std::abs(xi[static_cast<std::size_t>(i)]), pi / (pi - 1.0));
        }
        const double h_rhs = model.h_hat(std::abs(s)) * conj_sum + model.h0[node];
        const double h_val = std::abs(model.H(g, node, s, xi.data()));
        const double h_margin = h_val - h_rhs;
        rep.lower_order.worst_margin = std::max(rep.lower_order.worst_margin, h_margin);
        if (h_margin > tol_rel * std::max(1.0, std::abs(h_rhs))) ++rep.lower_order.violations;
    }
    return rep;
}

}  // namespace aniso
