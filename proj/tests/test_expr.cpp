#include <doctest.h>

#include <cmath>

#include "aniso/expr.hpp"

using namespace aniso;

namespace {

double eval2(const std::string& text, double x1 = 0.0, double x2 = 0.0) {
    const Expression e = Expression::parse(text, field_variables(2));
    const double env[2] = {x1, x2};
    return e.eval(std::span<const double>(env, 2));
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("power is right-associative") { CHECK(eval2("2^3^2") == 512.0); }

TEST_CASE("unary minus binds tighter than power") {
    CHECK(eval2("-2^2") == 4.0);
    CHECK(eval2("2^-2") == 0.25);
    CHECK(eval2("-(2^2)") == -4.0);
}

TEST_CASE("functions and literals") {
    CHECK(eval2("abs(-3) + min(1,2)") == 4.0);
    CHECK(eval2("max(1,2) * 3") == 6.0);
    CHECK(eval2("sin(x1)", std::acos(-1.0) / 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval2("sqrt(x1^2+x2^2)", 3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(eval2("exp(0)") == 1.0);
    CHECK(eval2("cos(0)") == 1.0);
    CHECK(eval2("1e-3 + 2.5E2") == doctest::Approx(250.001).epsilon(1e-15));
}

TEST_CASE("precedence of the four basic operators") {
    CHECK(eval2("2+3*4") == 14.0);
    CHECK(eval2("(2+3)*4") == 20.0);
    CHECK(eval2("8/2/2") == 2.0);
    CHECK(eval2("2*3^2") == 18.0);
}

TEST_CASE("flux variable environment") {
    const Expression e = Expression::parse("s * xi1 + xi2", flux_variables(2));
    const double env[5] = {0.0, 0.0, 2.0, 3.0, 4.0};  // x1 x2 s xi1 xi2
    CHECK(e.eval(std::span<const double>(env, 5)) == 10.0);
}

TEST_CASE("parse errors carry positions") {
    try {
        (void)Expression::parse("1 + y", field_variables(2));
        FAIL("expected a parse error");
    } catch (const ExprError& e) {
        CHECK(e.pos.line == 1);
        CHECK(e.pos.column == 5);
    }
    CHECK_THROWS_AS((void)Expression::parse("min(1)", field_variables(2)), ExprError);
    CHECK_THROWS_AS((void)Expression::parse("2 +", field_variables(2)), ExprError);
    CHECK_THROWS_AS((void)Expression::parse("", field_variables(2)), ExprError);
    CHECK_THROWS_AS((void)Expression::parse("foo(1)", field_variables(2)), ExprError);
}

TEST_CASE("domain errors report the offending position") {
    try {
        (void)eval2("1/(x1)");
        FAIL("expected a division error");
    } catch (const ExprError& e) {
        CHECK(e.pos.column == 2);
    }
    CHECK_THROWS_AS((void)eval2("0^-1"), ExprError);
    CHECK_THROWS_AS((void)eval2("(-2)^0.5"), ExprError);
    CHECK_THROWS_AS((void)eval2("sqrt(-1)"), ExprError);
    CHECK(eval2("(-8)^2") == 64.0);
}

}  // TEST_SUITE
