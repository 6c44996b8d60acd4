#include <doctest.h>

#include <cmath>

#include "nodalset/errors.hpp"
#include "nodalset/params.hpp"

using namespace nodalset;

TEST_CASE("derived exponents for representative parameter sets") {
    auto d = derive_exponents(Parameters::make(0.25, 1.0, 1.0, 1.0));
    CHECK(d.a == doctest::Approx(0.5));
    CHECK(d.k_q == doctest::Approx(0.5));
    CHECK(d.beta_q == 0);
    CHECK(d.mu == doctest::Approx(0.5));

    d = derive_exponents(Parameters::make(0.5, 1.5, 1.0, 1.0));
    CHECK(d.a == doctest::Approx(0.0));
    CHECK(d.k_q == doctest::Approx(2.0));
    CHECK(d.beta_q == 1);   // strictly below an integer k_q
    CHECK(d.mu == doctest::Approx(4.0));

    d = derive_exponents(Parameters::make(0.4, 1.5, 1.0, 1.0));
    CHECK(d.k_q == doctest::Approx(1.6));
    CHECK(d.beta_q == 1);
    CHECK(d.mu == doctest::Approx(1.6 * 1.8));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(Parameters::make(0.0, 1.0, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Parameters::make(1.0, 1.0, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Parameters::make(0.5, 2.0, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Parameters::make(0.5, 0.9, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(Parameters::make(0.5, 1.5, -1, 1), InvalidArgument);
    CHECK_THROWS_AS(Parameters::make(0.5, 1.5, 1, -1), InvalidArgument);
    CHECK_THROWS_AS(Parameters::make(0.5, 1.5, 1, 1, 0), InvalidArgument);
    CHECK_NOTHROW(Parameters::make(0.5, 1.0, 0, 0));
    CHECK_NOTHROW(Parameters::make(0.5, 1.0, 1, 1, 3));
}

TEST_CASE("boundary nonlinearity and its primitive") {
    const auto p = Parameters::make(0.3, 1.5, 2.0, 3.0);
    CHECK(boundary_nonlinearity(4.0, p) == doctest::Approx(4.0));
    CHECK(boundary_nonlinearity(-4.0, p) == doctest::Approx(-6.0));
    CHECK(boundary_nonlinearity(0.0, p) == 0.0);
    CHECK(F_value(4.0, p) == doctest::Approx(16.0));
    CHECK(F_value(-4.0, p) == doctest::Approx(24.0));
    CHECK(F_value(0.0, p) == 0.0);

    const auto p1 = Parameters::make(0.3, 1.0, 2.0, 3.0);
    CHECK(boundary_nonlinearity(1e-9, p1) == 2.0);
    CHECK(boundary_nonlinearity(-1e-9, p1) == -3.0);
    CHECK(boundary_nonlinearity(0.0, p1) == 0.0);
    CHECK(boundary_nonlinearity(0.05, p1, 0.1) == doctest::Approx(1.0));
    CHECK(boundary_nonlinearity(-0.2, p1, 0.1) == doctest::Approx(-3.0));
    CHECK(F_value(-2.0, p1) == doctest::Approx(6.0));
}

TEST_CASE("F is a primitive of the nonlinearity (central differences)") {
    for (double q : {1.1, 1.5, 1.9}) {
        const auto p = Parameters::make(0.3, q, 1.3, 0.7);
        for (double t : {-2.0, -0.5, 0.4, 1.7}) {
            const double h = 1e-5;
            const double dF = (F_value(t + h, p) - F_value(t - h, p)) / (2 * h);
            CHECK(dF == doctest::Approx(q * boundary_nonlinearity(t, p)).epsilon(1e-7));
        }
    }
}

TEST_CASE("property: exponent relations over a parameter grid") {
    for (int i = 1; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double s = i / 20.0;
            const double q = 1.0 + j / 20.0;
            const auto p = Parameters::make(s, q, 1.0, 1.0);
            const auto d = derive_exponents(p);
            CAPTURE(s);
            CAPTURE(q);
            CHECK(d.a == doctest::Approx(1 - 2 * s));
            CHECK(d.k_q * (2 - q) == doctest::Approx(2 * s));
            CHECK(d.beta_q < d.k_q);
            CHECK(d.beta_q + 1 >= d.k_q - 1e-12);
            CHECK(d.mu == doctest::Approx(d.k_q * (d.k_q + d.a)));
            // The Weiss coefficient 2 - 2(1 - 2s) - 2k(2 - q) changes sign exactly at k_q.
            const double C = critical_constant(1, 2.0, s);
            CHECK(C == doctest::Approx(4 * s));
            CHECK(C - 2 * (d.k_q + 0.01) * (2 - q) < 0.0);
            CHECK(C - 2 * (d.k_q - 0.01) * (2 - q) > 0.0);
            CHECK(std::abs(C - 2 * d.k_q * (2 - q)) < 1e-12);
        }
    }
}

TEST_CASE("critical constant") {
    CHECK(critical_constant(1, 1.0, 0.25) == doctest::Approx(2.0 - 0.5));
    CHECK(critical_constant(3, 2.0, 0.5) == doctest::Approx(6.0 - 2.0 * 2.0));
    CHECK_THROWS_AS(critical_constant(0, 2.0, 0.5), InvalidArgument);
}
