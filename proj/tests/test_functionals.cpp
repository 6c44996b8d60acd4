#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "nodalset/errors.hpp"
#include "nodalset/functionals.hpp"
#include "nodalset/homogeneous.hpp"
#include "oracles.hpp"

using namespace nodalset;

namespace {

std::shared_ptr<const Mesh> make_mesh(int N, double a) {
    return std::make_shared<const Mesh>(build_mesh(1.0, 1.0, N, N, default_grading(a), a));
}

}  // namespace

TEST_CASE("H of a constant is the weighted half-circle measure") {
    const double a = 0.5;
    const auto p = Parameters::make(0.25, 1.0, 1.0, 1.0);
    const Field f = sample_field(make_mesh(64, a), [](double, double) { return 1.0; }, p);
    const double Ia = oracle::sin_power_integral(a);
    CHECK(Ia == doctest::Approx(2.39628).epsilon(1e-5));
    for (double r : {0.1, 0.3, 0.6}) CHECK(H_val(f, 0.0, r, 4096) == doctest::Approx(Ia).epsilon(1e-4));
    CHECK(H_val(f, 0.2, 0.3) == doctest::Approx(Ia).epsilon(1e-3));
}

TEST_CASE("H of x scales like r^2") {
    for (double a : {0.0, 0.5}) {
        const auto p = Parameters::make((1 - a) / 2, 1.5, 1.0, 1.0);
        const Field f = sample_field(make_mesh(64, a), [](double x, double) { return x; }, p);
        // int cos^2 sin^a = I_a - I_{a+2}
        const double c = oracle::sin_power_integral(a) - oracle::sin_power_integral(a + 2);
        for (double r : {0.1, 0.3, 0.6}) {
            CAPTURE(a);
            CAPTURE(r);
            CHECK(H_val(f, 0.0, r, 4096) / (r * r) == doctest::Approx(c).epsilon(1e-4));
        }
    }
}

TEST_CASE("midpoint rule converges like n^-(1+a) on the endpoint singularity") {
    for (double a : {-0.5, 0.5}) {
        const auto p = Parameters::make((1 - a) / 2, 1.5, 1.0, 1.0);
        const Field f = sample_field(make_mesh(32, a), [](double, double) { return 1.0; }, p);
        const double exact = oracle::sin_power_integral(a);
        const double e1 = std::abs(H_val(f, 0.0, 0.4, 1024) - exact);
        const double e2 = std::abs(H_val(f, 0.0, 0.4, 4096) - exact);
        CAPTURE(a);
        CHECK(e1 / e2 == doctest::Approx(std::pow(4.0, 1 + a)).epsilon(0.05));
    }
}

TEST_CASE("property: H is quadratic in the field") {
    const auto p = Parameters::make(0.3, 1.5, 1.0, 1.0);
    const auto mesh = make_mesh(32, 0.4);
    const auto g = [](double x, double y) { return std::sin(3 * x) + y * y - 0.2; };
    const Field f = sample_field(mesh, g, p);
    for (double c : {-2.0, 0.5, 3.0}) {
        const Field fc = sample_field(mesh, [&](double x, double y) { return c * g(x, y); }, p);
        for (double r : {0.1, 0.45}) CHECK(H_val(fc, 0.1, r) == doctest::Approx(c * c * H_val(f, 0.1, r)).epsilon(1e-13));
    }
}

TEST_CASE("unweighted H derivative identity for x is quadrature-limited") {
    const auto p = Parameters::make(0.5, 1.5, 0.0, 0.0);
    const Field f = sample_field(make_mesh(512, 0.0), [](double x, double) { return x; }, p);
    CurveRequest req;
    req.n_theta = 512;
    const FunctionalCurve c = curve(f, 0.0, {0.2, 0.25, 0.3, 0.35, 0.4}, req, p);
    for (std::size_t i = 1; i + 1 < c.size(); ++i) CHECK(c.defect[i] <= 1e-6);
}

TEST_CASE("bulk energy of x is exact up to the boundary-cell quadrature") {
    for (double a : {-0.5, 0.0, 0.5}) {
        const auto p = Parameters::make((1 - a) / 2, 1.5, 1.0, 1.0);
        const Field f = sample_field(make_mesh(128, a), [](double x, double) { return x; }, p);
        for (double r : {0.2, 0.5}) {
            CAPTURE(a);
            CAPTURE(r);
            const double exact = std::pow(r, 2 + a) / (2 + a) * oracle::sin_power_integral(a);
            CHECK(bulk_energy(f, 0.0, r) == doctest::Approx(exact).epsilon(1e-4));
        }
    }
}

TEST_CASE("trace integral of F is exact on linear traces") {
    const auto mesh = make_mesh(32, 0.5);
    const auto lin = [](double x, double) { return x; };
    const auto p1 = Parameters::make(0.25, 1.0, 1.0, 1.0);
    const Field f1 = sample_field(mesh, lin, p1);
    for (double r : {0.1, 0.33, 0.8}) CHECK(trace_F_integral(f1, 0.0, r, p1) == doctest::Approx(r * r).epsilon(1e-12));
    const auto p15 = Parameters::make(0.25, 1.5, 1.0, 1.0);
    const Field f15 = sample_field(mesh, lin, p15);
    for (double r : {0.1, 0.33, 0.8})
        CHECK(trace_F_integral(f15, 0.0, r, p15) == doctest::Approx(2 * std::pow(r, 2.5) / 2.5).epsilon(1e-12));
    // unequal coefficients weigh the two sides separately
    const auto pu = Parameters::make(0.25, 1.5, 2.0, 0.5);
    const Field fu = sample_field(mesh, lin, pu);
    CHECK(trace_F_integral(fu, 0.1, 0.3, pu) ==
          doctest::Approx((2.0 * std::pow(0.4, 2.5) + 0.5 * std::pow(0.2, 2.5)) / 2.5).epsilon(1e-12));
}

TEST_CASE("frequency of L_a-harmonic polynomials equals their degree") {
    const double a = 0.5;
    const auto p = Parameters::make(0.25, 1.5, 0.0, 0.0);
    const auto mesh = make_mesh(256, a);
    for (int k : {1, 2, 3}) {
        const auto poly = sB_basis(a, k);
        const Field f = sample_field(mesh, [&](double x, double y) { return poly(x, y); }, p);
        for (double r : {0.2, 0.4}) {
            CAPTURE(k);
            CAPTURE(r);
            CHECK(N_t_val(f, 0.0, r, p.q, p) == doctest::Approx(k).epsilon(2e-3));
            CHECK(std::abs(W_val(f, 0.0, r, k, 2.0, p)) < 1e-2 * H_val(f, 0.0, r) / std::pow(r, 2 * k));
            // only the bilinear interpolation error of the sampled field remains
            CHECK(monneau_val(f, 0.0, [&](double x, double y) { return poly(x, y); }, r, k) <
                  1e-5 * H_val(f, 0.0, r) / std::pow(r, 2 * k));
        }
    }
}

TEST_CASE("curve tabulates the functionals and satisfies the H derivative identity") {
    const double a = 0.0;
    const auto p = Parameters::make(0.5, 1.5, 0.0, 0.0);
    const auto poly = sB_basis(a, 2);
    const Field f = sample_field(make_mesh(256, a), [&](double x, double y) { return poly(x, y) + 0.3 * x; }, p);
    CurveRequest req;
    req.extra_t = {1.2};
    req.weiss = {{2.0, 2.0}, {1.0, 1.5}};
    req.monneau_poly = [&](double x, double y) { return poly(x, y); };
    req.monneau_k = 2.0;
    std::vector<double> radii;
    for (double r = 0.1; r < 0.61; r += 0.05) radii.push_back(r);
    const FunctionalCurve c = curve(f, 0.0, radii, req, p);
    REQUIRE(c.size() == radii.size());
    CHECK(std::isnan(c.dHdr.front()));
    CHECK(std::isnan(c.dHdr.back()));
    for (std::size_t i = 1; i + 1 < c.size(); ++i) {
        CHECK(c.defect[i] <= 5e-2 * std::abs(c.dHdr[i]));
        CHECK(c.N_q[i] == doctest::Approx(c.E_q[i] / c.H[i]));
        CHECK_FALSE(c.flagged[i]);
    }
    CHECK(c.weiss_column(2.0, 2.0).size() == c.size());
    CHECK(c.weiss_column(1.0, 1.5).size() == c.size());
    CHECK_THROWS_AS(c.weiss_column(3.0, 2.0), InvalidArgument);
    REQUIRE(c.E_t.size() == 1);
    CHECK(c.E_t[0].first == 1.2);
    CHECK(c.monneau.size() == c.size());
    // lambda = 0 removes the trace term: all E_t agree
    CHECK(c.E_t[0].second[3] == doctest::Approx(c.E_q[3]));
    CHECK(c.E_2[3] == doctest::Approx(c.E_q[3]));
}

TEST_CASE("inadmissible radii are flagged, not fatal") {
    const auto p = Parameters::make(0.25, 1.5, 1.0, 1.0);
    const Field f = sample_field(make_mesh(32, 0.5), [](double x, double) { return x; }, p);
    CHECK_THROWS_AS(check_radius(f, 0.0, 0.0), InvalidArgument);
    CHECK_THROWS_AS(check_radius(f, 0.8, 0.5), InvalidArgument);
    CHECK_THROWS_AS(check_radius(f, 0.0, 1.0), InvalidArgument);
    CHECK_NOTHROW(check_radius(f, 0.0, 0.5));
    CHECK_THROWS_AS(H_val(f, 0.8, 0.5), InvalidArgument);
    const FunctionalCurve c = curve(f, 0.0, {0.2, 0.4, 0.99}, CurveRequest{}, p);
    CHECK_FALSE(c.flagged[0]);
    CHECK(c.flagged[2]);
    CHECK(std::isnan(c.H[2]));
    CHECK_FALSE(c.notes.empty());
    CHECK_THROWS_AS(curve(f, 0.0, {0.3, 0.2}, CurveRequest{}, p), InvalidArgument);
}

TEST_CASE("vanishing field triggers the degenerate denominator") {
    const auto p = Parameters::make(0.25, 1.5, 1.0, 1.0);
    const Field f = sample_field(make_mesh(32, 0.5), [](double, double) { return 0.0; }, p);
    CHECK(H_val(f, 0.0, 0.3) == 0.0);
    CHECK_THROWS_AS(N_t_val(f, 0.0, 0.3, 1.5, p), DegenerateDenominator);
    CHECK_THROWS_AS(N_t_val(f, 0.0, 0.3, 1.5, p), NumericalError);
    const FunctionalCurve c = curve(f, 0.0, {0.1, 0.2, 0.3}, CurveRequest{}, p);
    CHECK(std::isnan(c.N_q[1]));
}

TEST_CASE("monotonicity checks on synthetic curves") {
    FunctionalCurve c;
    c.r = {0.1, 0.2, 0.3, 0.4, 0.5};
    c.N_q = {0.50, 0.51, 0.52, 0.53, 0.54};
    c.W = {{{0.5, 2.0}, {-1.0, -0.9, -0.95, -0.5, -0.4}}};
    MonotonicityParams mp;
    mp.k = 0.5;
    auto rep = check_monotonicity(c, MonotonicityKind::weiss_k2, mp, 1e-3);
    CHECK_FALSE(rep.pass);
    CHECK(rep.max_decrease == doctest::Approx(0.05));
    CHECK(rep.scale == doctest::Approx(1.0));
    CHECK(rep.monotone_up_to == doctest::Approx(0.2));
    CHECK(check_monotonicity(c, MonotonicityKind::weiss_k2, mp, 0.06).pass);

    mp.C_tilde = 0.0;
    mp.alpha = 0.5;
    rep = check_monotonicity(c, MonotonicityKind::almgren_perturbed, mp, 1e-12);
    CHECK(rep.pass);
    REQUIRE(rep.monitored.size() == 5);
    CHECK(rep.monitored[2] == doctest::Approx(1.52));
    mp.C_tilde = 1.0;
    rep = check_monotonicity(c, MonotonicityKind::almgren_perturbed, mp, 1e-12);
    CHECK(rep.monitored[3] == doctest::Approx(std::exp(std::sqrt(0.4)) * 1.53));
    CHECK(rep.monotone_up_to == doctest::Approx(0.5));

    c.r.resize(2);
    CHECK_THROWS_AS(check_monotonicity(c, MonotonicityKind::weiss_k2, mp, 1e-3), InvalidArgument);
}

TEST_CASE("perturbed Almgren constants") {
    const auto p = Parameters::make(0.25, 1.5, 1.0, 1.0);   // k_q = 1
    const Field f = sample_field(make_mesh(64, 0.5), [](double x, double) { return 2.0 + x; }, p);
    const FunctionalCurve c = curve(f, 0.0, {0.1, 0.2, 0.3, 0.4}, CurveRequest{}, p);
    const MonotonicityParams mp = almgren_constants(c, p, 0.0);
    CHECK(mp.alpha == doctest::Approx(0.5));
    CHECK(mp.C_tilde > 0.0);
    // the bound holds with equality at the worst radius
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double g = critical_constant(1, p.q, p.s) / p.q * std::pow(c.r[i], -(1 + 0.5)) * c.trace_F[i] /
                         (c.E_q[i] + c.H[i]);
        worst = std::max(worst, g * std::pow(c.r[i], 1 - mp.alpha) / mp.alpha);
    }
    CHECK(mp.C_tilde == doctest::Approx(worst));
    CHECK_THROWS_AS(almgren_constants(c, p, 1.0), InvalidArgument);
    CHECK_THROWS_AS(almgren_constants(c, p, 1.3), InvalidArgument);
}
