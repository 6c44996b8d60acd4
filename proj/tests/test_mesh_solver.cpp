#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "nodalset/datasets.hpp"
#include "nodalset/errors.hpp"
#include "nodalset/extension_solver.hpp"
#include "nodalset/mesh.hpp"

using namespace nodalset;

namespace {

std::shared_ptr<const Mesh> make_mesh(int N, double a, double gamma = -1) {
    return std::make_shared<const Mesh>(build_mesh(1.0, 1.0, N, N, gamma > 0 ? gamma : default_grading(a), a));
}

std::vector<double> zeros(const Mesh& m) { return std::vector<double>(m.x.size(), 0.0); }

double max_nodal_error(const Field& f, const std::function<double(double, double)>& u) {
    const Mesh& m = f.mesh();
    double e = 0.0;
    for (std::size_t j = 0; j < m.y.size(); ++j)
        for (std::size_t i = 0; i < m.x.size(); ++i)
            e = std::max(e, std::abs(f.value(int(i), int(j)) - u(m.x[i], m.y[j])));
    return e;
}

}  // namespace

TEST_CASE("weight integrals") {
    CHECK(weight_integral(0.0, 1.0, 0.5) == doctest::Approx(1.0 / 1.5));
    CHECK(weight_integral(0.0, 1.0, -0.5) == doctest::Approx(2.0));
    CHECK(weight_integral(1.0, 2.0, 0.0) == doctest::Approx(1.0));
    CHECK(weight_integral(0.5, 2.0, 2.0) == doctest::Approx((8.0 - 0.125) / 3.0));
    CHECK(default_grading(0.5) == doctest::Approx(4.0));
    CHECK(default_grading(0.0) == doctest::Approx(2.0));
    CHECK(default_grading(-0.5) == doctest::Approx(1.0));
}

TEST_CASE("mesh geometry") {
    for (double a : {-0.5, 0.0, 0.5}) {
        const Mesh m = build_mesh(1.5, 2.0, 16, 12, default_grading(a), a);
        CHECK(m.x.size() == 17);
        CHECK(m.y.size() == 13);
        CHECK(m.x.front() == doctest::Approx(-1.5));
        CHECK(m.x.back() == doctest::Approx(1.5));
        CHECK(m.x[8] == doctest::Approx(0.0));
        CHECK(m.y.front() == 0.0);
        CHECK(m.y.back() == doctest::Approx(2.0));
        double total = 0.0, dual = 0.0, rows = 0.0;
        for (std::size_t j = 0; j < m.ya_cell.size(); ++j) {
            total += m.ya_cell[j];
            CHECK(m.ya_lower[j] + m.ya_upper[j] == doctest::Approx(m.ya_cell[j]));
            CHECK(m.y[j + 1] > m.y[j]);
        }
        for (double w : m.dual_x) dual += w;
        for (double w : m.ya_row) rows += w;
        CHECK(total == doctest::Approx(std::pow(2.0, 1 + a) / (1 + a)));
        CHECK(rows == doctest::Approx(total));
        CHECK(dual == doctest::Approx(3.0));
        CHECK(m.index(3, 2) == 2 * 17 + 3);
        CHECK(m.locate_x(0.01) == 8);
    }
    CHECK_THROWS_AS(build_mesh(1, 1, 4, 16, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(build_mesh(1, 1, 16, 16, 0.5, 0), InvalidArgument);
    CHECK_THROWS_AS(build_mesh(1, 1, 16, 16, 1, 1.0), InvalidArgument);
}

TEST_CASE("assembled matrix is symmetric with constants in its kernel") {
    const auto mesh = make_mesh(16, 0.5);
    const WeightedSystem sys = assemble(mesh);
    const Eigen::SparseMatrix<double> K = sys.matrix();
    const Eigen::SparseMatrix<double> Kt = K.transpose();
    CHECK((K - Kt).norm() <= 1e-12 * K.norm());
    for (int k = 0; k < K.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it)
            if (it.row() == it.col()) CHECK(it.value() > 0.0);
    const std::vector<double> ones(mesh->nodes(), 1.0);
    for (double r : sys.apply(ones)) CHECK(std::abs(r) < 1e-12);
    CHECK(sys.is_dirichlet(0, 3));
    CHECK(sys.is_dirichlet(5, mesh->My));
    CHECK_FALSE(sys.is_dirichlet(5, 0));
}

TEST_CASE("linear solves are exact on x and on constant weighted flux profiles") {
    for (double a : {-0.5, 0.0, 0.5}) {
        CAPTURE(a);
        const auto mesh = make_mesh(32, a);
        const WeightedSystem sys = assemble(mesh);
        const auto p = Parameters::make((1 - a) / 2, 1.5, 0.0, 0.0);
        const auto lin = [](double x, double) { return x; };
        const Field f = solve_linear(sys, lin, zeros(*mesh), p, {1e-14, 100000});
        CHECK(max_nodal_error(f, lin) < 1e-10);
        // y^a d/dy [y^{1-a}/(1-a)] = 1, so the trace flux -y^a u_y is -1.
        const auto prof = [a](double x, double y) { return 0.3 * x + std::pow(y, 1 - a) / (1 - a); };
        std::vector<double> flux(mesh->x.size(), -1.0);
        const Field g = solve_linear(sys, prof, flux, p, {1e-14, 100000});
        CHECK(max_nodal_error(g, prof) < 1e-10);
    }
}

TEST_CASE("second-order convergence on the degree-2 harmonic polynomial") {
    const double a = 0.5;
    const auto p = Parameters::make(0.25, 1.5, 0.0, 0.0);
    const auto exact = polynomial_boundary(a, {{2, 1.0}});
    double prev = 0.0;
    for (int N : {16, 32, 64}) {
        const auto mesh = make_mesh(N, a);
        const Field f = solve_linear(assemble(mesh), exact, zeros(*mesh), p);
        const double e = max_nodal_error(f, exact);
        if (prev > 0) CHECK(prev / e == doctest::Approx(4.0).epsilon(0.2));
        prev = e;
    }
}

TEST_CASE("nonlinear solve") {
    const auto mesh = make_mesh(32, 0.5);
    const WeightedSystem sys = assemble(mesh);

    SUBCASE("vanishing coefficients need one iteration") {
        const auto p = Parameters::make(0.25, 1.5, 0.0, 0.0);
        const Field f = solve_nonlinear(sys, p, [](double x, double) { return x; });
        CHECK(f.report.converged);
        CHECK(f.report.iterations == 1);
        CHECK(max_nodal_error(f, [](double x, double) { return x; }) < 1e-10);
    }
    SUBCASE("converged solve has small residuals") {
        const auto p = Parameters::make(0.25, 1.5, 1.0, 1.0);
        const Field f = solve_nonlinear(sys, p, random_boundary(3, 0.0));
        REQUIRE(f.report.converged);
        const Residual r = residual(f, p);
        CHECK(r.interior < 1e-9);
        CHECK(r.boundary < 1e-7);
        CHECK(f.report.final_update <= 1e-10);
    }
    SUBCASE("linear problem preserves odd symmetry") {
        const auto p = Parameters::make(0.25, 1.5, 0.0, 0.0);
        const Field f = solve_nonlinear(sys, p, [](double x, double y) { return x * (1 + y * y); });
        REQUIRE(f.report.converged);
        const Mesh& m = f.mesh();
        for (int j = 0; j <= m.My; j += 4)
            for (int i = 0; i <= m.Nx; ++i) CHECK(std::abs(f.value(i, j) + f.value(m.Nx - i, j)) < 1e-10);
    }
    SUBCASE("non-convergence is reported, not thrown") {
        const auto p = Parameters::make(0.25, 1.0, 1.0, 1.0);
        NonlinearSolveOptions opts;
        opts.max_iter = 2;
        Field f = solve_nonlinear(sys, p, random_boundary(1, 0.0), opts);
        CHECK_FALSE(f.report.converged);
        CHECK(f.report.iterations == 2);
        CHECK(f.report.epsilon == doctest::Approx(mesh->y[1]));
    }
    SUBCASE("invalid damping") {
        const auto p = Parameters::make(0.25, 1.5, 1.0, 1.0);
        NonlinearSolveOptions opts;
        opts.omega = 1.5;
        CHECK_THROWS_AS(solve_nonlinear(sys, p, random_boundary(1, 0.0), opts), InvalidArgument);
    }
}

TEST_CASE("field evaluation") {
    const auto mesh = make_mesh(16, 0.0);
    const auto p = Parameters::make(0.5, 1.5, 1.0, 1.0);
    const Field f = sample_field(mesh, [](double x, double y) { return 2 * x - 3 * y + x * y; }, p);
    CHECK(f(mesh->x[3], mesh->y[5]) == doctest::Approx(f.value(3, 5)));
    // bilinear interpolation is exact on span{1, x, y, xy}
    CHECK(f(0.137, 0.411) == doctest::Approx(2 * 0.137 - 3 * 0.411 + 0.137 * 0.411));
    const auto g = f.gradient(0.137, 0.411);
    CHECK(g[0] == doctest::Approx(2 + 0.411));
    CHECK(g[1] == doctest::Approx(-3 + 0.137));
    CHECK(f.trace(0.25) == doctest::Approx(0.5));
    CHECK(f.trace_values().size() == 17);
    CHECK(f.contains(0.0, 0.5));
    CHECK_FALSE(f.contains(1.5, 0.5));
    CHECK_THROWS_AS(Field(mesh, p, std::vector<double>(3, 0.0)), InvalidArgument);
}
