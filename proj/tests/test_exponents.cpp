#include <doctest.h>

#include <cmath>
#include <limits>

#include "aniso/exponents.hpp"

using namespace aniso;

namespace {

ExponentField sampled(const GridPtr& g, double (*f)(double, double)) {
    std::vector<double> v(g->total_nodes());
    for (std::size_t q = 0; q < v.size(); ++q) {
        double x[2];
        g->node_coords(q, x);
        v[q] = f(x[0], x[1]);
    }
    return ExponentField(g, std::move(v));
}

}  // namespace

TEST_SUITE("exponents") {

TEST_CASE("bounds are recomputed from the samples") {
    const GridPtr g = make_grid(2, 3.0, 17, 2.0);
    const ExponentField p = sampled(g, [](double x, double) { return 2.0 + 0.5 * std::sin(x); });
    CHECK(p.p_minus() >= 1.5);
    CHECK(p.p_plus() <= 2.5);
    CHECK(p.p_minus() < p.p_plus());
}

TEST_CASE("the admissible class requires min > 1") {
    const GridPtr g = make_grid(2, 3.0, 9, 2.0);
    CHECK_THROWS(ExponentField::constant(g, 1.0));
    CHECK_THROWS(ExponentField::constant(g, 0.5));
    CHECK_NOTHROW(ExponentField::constant(g, 1.0 + 1e-6));
}

TEST_CASE("conjugate on constants") {
    const GridPtr g = make_grid(2, 3.0, 9, 2.0);
    const ExponentField c2 = conjugate(ExponentField::constant(g, 2.0));
    const ExponentField c3 = conjugate(ExponentField::constant(g, 3.0));
    for (std::size_t q = 0; q < g->total_nodes(); ++q) {
        CHECK(c2[q] == 2.0);
        CHECK(c3[q] == doctest::Approx(1.5).epsilon(1e-15));
    }
}

TEST_CASE("conjugate is an involution nodewise") {
    const GridPtr g = make_grid(2, 3.0, 21, 2.0);
    const ExponentField p = sampled(g, [](double x, double) {
        const double s = std::sin(x);
        return 2.0 + s * s;
    });
    const ExponentField back = conjugate(conjugate(p));
    for (std::size_t q = 0; q < g->total_nodes(); ++q)
        CHECK(back[q] == doctest::Approx(p[q]).epsilon(1e-14));
}

TEST_CASE("harmonic mean on constants") {
    const GridPtr g2 = make_grid(2, 3.0, 9, 2.0);
    {
        ExponentVector pv(ExponentField::constant(g2, 1.5),
                          {ExponentField::constant(g2, 1.5), ExponentField::constant(g2, 1.5)});
        const ExponentField pbar = harmonic_mean_exponent(pv);
        CHECK(pbar[0] == doctest::Approx(1.5).epsilon(1e-15));
    }
    {
        ExponentVector pv(ExponentField::constant(g2, 2.0),
                          {ExponentField::constant(g2, 2.0), ExponentField::constant(g2, 4.0)});
        const ExponentField pbar = harmonic_mean_exponent(pv);
        CHECK(pbar[0] == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    }
    const GridPtr g3 = make_grid(3, 2.0, 7, 1.5);
    ExponentVector pv3(ExponentField::constant(g3, 2.0),
                       {ExponentField::constant(g3, 2.0), ExponentField::constant(g3, 3.0),
                        ExponentField::constant(g3, 6.0)});
    const ExponentField pbar3 = harmonic_mean_exponent(pv3);
    CHECK(pbar3[0] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("harmonic mean lies between the directional extremes") {
    const GridPtr g = make_grid(2, 3.0, 17, 2.0);
    ExponentVector pv(ExponentField::constant(g, 3.0),
                      {sampled(g, [](double x, double) { return 2.0 + 0.5 * std::sin(x); }),
                       sampled(g, [](double, double y) { return 3.0 + 0.25 * std::cos(y); })});
    const ExponentField pbar = harmonic_mean_exponent(pv);
    for (std::size_t q = 0; q < g->total_nodes(); ++q) {
        const double lo = std::min(pv.p(0)[q], pv.p(1)[q]);
        const double hi = std::max(pv.p(0)[q], pv.p(1)[q]);
        CHECK(pbar[q] >= lo - 1e-14);
        CHECK(pbar[q] <= hi + 1e-14);
    }
}

TEST_CASE("critical exponents with the infinite branch") {
    const GridPtr g2 = make_grid(2, 3.0, 9, 2.0);
    {
        ExponentVector pv(ExponentField::constant(g2, 1.5),
                          {ExponentField::constant(g2, 1.5), ExponentField::constant(g2, 1.5)});
        const CriticalExponents ce = critical_exponents(pv);
        CHECK(ce.p_star[0] == doctest::Approx(6.0).epsilon(1e-14));
        CHECK(ce.p_inf[0] == doctest::Approx(6.0).epsilon(1e-14));
    }
    {
        ExponentVector pv(ExponentField::constant(g2, 2.0),
                          {ExponentField::constant(g2, 2.0), ExponentField::constant(g2, 4.0)});
        const CriticalExponents ce = critical_exponents(pv);  // pbar = 8/3 > N = 2
        CHECK(std::isinf(ce.p_star[0]));
        CHECK(std::isinf(ce.p_inf[0]));
    }
    const GridPtr g3 = make_grid(3, 2.0, 7, 1.5);
    ExponentVector pv3(ExponentField::constant(g3, 2.0),
                       {ExponentField::constant(g3, 2.0), ExponentField::constant(g3, 2.0),
                        ExponentField::constant(g3, 2.0)});
    const CriticalExponents ce3 = critical_exponents(pv3);
    CHECK(ce3.p_star[0] == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("equal constant exponents reproduce the classical critical exponent") {
    const GridPtr g3 = make_grid(3, 2.0, 7, 1.5);
    const double q = 1.7;  // below N = 3
    ExponentVector pv(ExponentField::constant(g3, q),
                      {ExponentField::constant(g3, q), ExponentField::constant(g3, q),
                       ExponentField::constant(g3, q)});
    const ExponentField pbar = harmonic_mean_exponent(pv);
    const CriticalExponents ce = critical_exponents(pv);
    CHECK(pbar[0] == doctest::Approx(q).epsilon(1e-15));
    CHECK(ce.p_star[0] == doctest::Approx(3.0 * q / (3.0 - q)).epsilon(1e-14));
    CHECK(ce.p_star[0] >= pbar[0]);
}

TEST_CASE("global exponent bounds") {
    const GridPtr g = make_grid(2, 3.0, 9, 2.0);
    const ExponentVector pv(ExponentField::constant(g, 1.5),
                            {ExponentField::constant(g, 1.5), ExponentField::constant(g, 3.0)});
    CHECK(pv.underline_p() == 1.5);
    CHECK(pv.overline_p_max() == 3.0);
    // the zero-order exponent may sit below the directional ones
    const ExponentVector mixed(ExponentField::constant(g, 1.4),
                               {ExponentField::constant(g, 1.5),
                                ExponentField::constant(g, 3.0)});
    CHECK(mixed.underline_p() == 1.4);
    CHECK_THROWS(ExponentVector(ExponentField::constant(g, 2.0),
                                {ExponentField::constant(g, 2.0)}));  // wrong arity
}

}  // TEST_SUITE
