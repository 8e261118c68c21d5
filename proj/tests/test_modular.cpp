#include <doctest.h>

#include <cmath>

#include "aniso/modular.hpp"
#include "aniso/util.hpp"

using namespace aniso;

namespace {

// nodes*mesh spans exactly `width` per axis, so the node-centered cells tile
// a box of measure width^dim.
GridPtr tiled_box(int dim, int nodes, double width) {
    const double extent = width * (nodes - 1) / (2.0 * nodes);
    return make_grid(dim, extent, nodes, extent);
}

GridFunction random_field(const GridPtr& g, Rng& rng, double amp = 1.0) {
    GridFunction u(g);
    for (std::size_t q = 0; q < g->total_nodes(); ++q) u[q] = rng.uniform(-amp, amp);
    return u;
}

ExponentField wavy_exponent(const GridPtr& g) {
    std::vector<double> v(g->total_nodes());
    for (std::size_t q = 0; q < v.size(); ++q) {
        double x[4];
        g->node_coords(q, x);
        v[q] = 2.0 + 0.5 * std::sin(x[0]);
    }
    return ExponentField(g, std::move(v));
}

}  // namespace

TEST_SUITE("modular") {

TEST_CASE("constant field on a measure-one box") {
    const GridPtr g = tiled_box(2, 8, 1.0);
    CHECK(g->total_nodes() * g->cell_volume() == doctest::Approx(1.0).epsilon(1e-15));
    const GridFunction u(g, 2.0);
    CHECK(modular(u, ExponentField::constant(g, 3.0)) == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(modular(GridFunction(g, 0.0), ExponentField::constant(g, 3.0)) == 0.0);
}

TEST_CASE("modular approximates the integral of a smooth profile") {
    const GridPtr g = tiled_box(2, 128, 1.0);
    GridFunction u(g);
    for (std::size_t q = 0; q < g->total_nodes(); ++q) {
        double x[2];
        g->node_coords(q, x);
        u[q] = x[0] + 0.5;  // ranges over [0,1]
    }
    const double got = modular(u, ExponentField::constant(g, 2.0));
    CHECK(got == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("luxemburg norm reduces to the classical norm for constant exponents") {
    const GridPtr g = tiled_box(2, 16, 2.0);
    Rng rng(21);
    for (double q : {1.5, 2.0, 3.0}) {
        const ExponentField p = ExponentField::constant(g, q);
        for (int rep = 0; rep < 5; ++rep) {
            const GridFunction u = random_field(g, rng, 2.0);
            const double classical = std::pow(modular(u, p), 1.0 / q);
            const double lux = luxemburg_norm(u, p);
            CHECK(std::abs(lux - classical) <= 1e-10 * classical);
        }
    }
}

TEST_CASE("unit constant on a measure-four box") {
    const GridPtr g = tiled_box(2, 8, 2.0);
    const GridFunction u(g, 1.0);
    CHECK(luxemburg_norm(u, ExponentField::constant(g, 2.0)) ==
          doctest::Approx(2.0).epsilon(1e-11));
    CHECK(luxemburg_norm(GridFunction(g, 0.0), ExponentField::constant(g, 2.0)) == 0.0);
}

TEST_CASE("unit-modular identity on random fields") {
    const GridPtr g = make_grid(2, 2.0, 17, 1.5);
    const ExponentField p = wavy_exponent(g);
    Rng rng(33);
    for (int rep = 0; rep < 100; ++rep) {
        GridFunction u = random_field(g, rng, 3.0);
        const double lam = luxemburg_norm(u, p);
        REQUIRE(lam > 0.0);
        for (std::size_t q = 0; q < u.size(); ++q) u[q] /= lam;
        CHECK(std::abs(modular(u, p) - 1.0) <= 1e-10);
    }
}

TEST_CASE("luxemburg norm is monotone in the absolute value") {
    const GridPtr g = make_grid(2, 2.0, 13, 1.5);
    const ExponentField p = wavy_exponent(g);
    Rng rng(44);
    for (int rep = 0; rep < 50; ++rep) {
        const GridFunction v = random_field(g, rng, 2.0);
        GridFunction u = v;
        for (std::size_t q = 0; q < u.size(); ++q) u[q] *= rng.uniform();
        CHECK(luxemburg_norm(u, p) <= luxemburg_norm(v, p) + 1e-11);
    }
}

TEST_CASE("gauge homogeneity") {
    const GridPtr g = make_grid(2, 2.0, 13, 1.5);
    const ExponentField p = wavy_exponent(g);
    Rng rng(55);
    const GridFunction u = random_field(g, rng);
    GridFunction two_u = u;
    for (std::size_t q = 0; q < u.size(); ++q) two_u[q] *= 2.0;
    CHECK(luxemburg_norm(two_u, p) == doctest::Approx(2.0 * luxemburg_norm(u, p)).epsilon(1e-11));
}

TEST_CASE("anisotropic norm on the classical grid") {
    const GridPtr g = make_grid(2, 2.0, 17, 1.5);
    ExponentVector pv(ExponentField::constant(g, 2.0),
                      {ExponentField::constant(g, 2.0), ExponentField::constant(g, 2.0)});
    // hat profile supported in the active ball
    GridFunction u(g);
    for (std::size_t q = 0; q < g->total_nodes(); ++q) {
        double x[2];
        g->node_coords(q, x);
        u[q] = std::max(0.0, 1.0 - std::abs(x[0])) * std::max(0.0, 1.0 - std::abs(x[1]));
    }
    const std::vector<GridFunction> grads = discrete_gradient(u);
    double expected = std::sqrt(modular(u, pv.p0()));
    for (int d = 0; d < 2; ++d) expected += std::sqrt(modular(grads[d], pv.p(d)));
    CHECK(anisotropic_norm(u, pv) == doctest::Approx(expected).epsilon(1e-10));

    CHECK(anisotropic_norm(GridFunction(g, 0.0), pv) == 0.0);
    GridFunction two_u = u;
    for (std::size_t q = 0; q < u.size(); ++q) two_u[q] *= 2.0;
    CHECK(anisotropic_norm(two_u, pv) ==
          doctest::Approx(2.0 * anisotropic_norm(u, pv)).epsilon(1e-10));
}

TEST_CASE("norm-modular bound") {
    const GridPtr g = tiled_box(2, 8, 1.0);
    const ExponentField p2 = ExponentField::constant(g, 2.0);
    {
        const NormModularBound r = norm_modular_bound_check(GridFunction(g, 0.0), p2);
        CHECK(r.lhs == 0.0);
        CHECK(r.rhs == 1.0);
        CHECK(r.holds);
    }
    {
        const NormModularBound r = norm_modular_bound_check(GridFunction(g, 3.0), p2);
        CHECK(r.lhs == doctest::Approx(3.0).epsilon(1e-11));
        CHECK(r.rhs == doctest::Approx(std::sqrt(10.0)).epsilon(1e-13));
        CHECK(r.holds);
    }
    const GridPtr gw = make_grid(2, 2.0, 13, 1.5);
    const ExponentField pw = wavy_exponent(gw);
    Rng rng(66);
    for (int rep = 0; rep < 100; ++rep)
        CHECK(norm_modular_bound_check(random_field(gw, rng, 4.0), pw).holds);
}

TEST_CASE("bounded-grid embedding probe stays bounded") {
    const GridPtr g = make_grid(2, 2.0, 17, 1.5);
    ExponentVector pv(ExponentField::constant(g, 2.0),
                      {ExponentField::constant(g, 2.0), ExponentField::constant(g, 2.0)});
    const ExponentField q = harmonic_mean_exponent(pv);
    const CriticalExponents ce = critical_exponents(pv);
    for (std::size_t n = 0; n < q.values().size(); ++n) CHECK(q[n] < ce.p_inf[n]);
    Rng rng(77);
    double max_ratio = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        GridFunction u(g);
        for (const ActiveSpan& s : g->active_spans())
            for (std::size_t idx = s.offset; idx < s.offset + s.length; ++idx)
                u[idx] = rng.uniform(-1.0, 1.0);
        const double denom = anisotropic_norm(u, pv);
        REQUIRE(denom > 0.0);
        max_ratio = std::max(max_ratio, luxemburg_norm(u, q) / denom);
    }
    CHECK(max_ratio < 50.0);
    MESSAGE("embedding probe max ratio: ", max_ratio);
}

}  // TEST_SUITE
