#include "nodalset/extension_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

#include "nodalset/errors.hpp"

namespace nodalset {

WeightedSystem::WeightedSystem(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
    const Mesh& m = *mesh_;
    const int Nx = m.Nx;
    const int My = m.My;
    cx_.resize(static_cast<std::size_t>(Nx) * (My + 1));
    for (int j = 0; j <= My; ++j) {
        for (int i = 0; i < Nx; ++i) {
            cx_[static_cast<std::size_t>(j) * Nx + i] = m.ya_row[j] / (m.x[i + 1] - m.x[i]);
        }
    }
    cy_.resize(static_cast<std::size_t>(Nx + 1) * My);
    for (int j = 0; j < My; ++j) {
        for (int i = 0; i <= Nx; ++i) {
            cy_[static_cast<std::size_t>(j) * (Nx + 1) + i] = m.dual_x[i] / m.yma_cell[j];
        }
    }
    unknown_.assign(m.nodes(), -1);
    for (int j = 0; j < My; ++j) {
        for (int i = 1; i < Nx; ++i) unknown_[m.index(i, j)] = n_unknowns_++;
    }

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n_unknowns_) * 5);
    for (int j = 0; j < My; ++j) {
        for (int i = 1; i < Nx; ++i) {
            const int row = unknown(i, j);
            double diag = 0.0;
            auto couple = [&](int ii, int jj, double c) {
                diag += c;
                const int col = unknown(ii, jj);
                if (col >= 0) trips.emplace_back(row, col, -c);
            };
            couple(i - 1, j, cx(i - 1, j));
            couple(i + 1, j, cx(i, j));
            couple(i, j + 1, cy(i, j));
            if (j > 0) couple(i, j - 1, cy(i, j - 1));
            trips.emplace_back(row, row, diag);
        }
    }
    K_.resize(n_unknowns_, n_unknowns_);
    K_.setFromTriplets(trips.begin(), trips.end());
    K_.makeCompressed();
}

std::vector<double> WeightedSystem::apply(std::span<const double> u) const {
    const Mesh& m = *mesh_;
    std::vector<double> r(m.nodes(), 0.0);
    for (int j = 0; j <= m.My; ++j) {
        for (int i = 0; i < m.Nx; ++i) {
            const double f = cx(i, j) * (u[m.index(i, j)] - u[m.index(i + 1, j)]);
            r[m.index(i, j)] += f;
            r[m.index(i + 1, j)] -= f;
        }
    }
    for (int j = 0; j < m.My; ++j) {
        for (int i = 0; i <= m.Nx; ++i) {
            const double f = cy(i, j) * (u[m.index(i, j)] - u[m.index(i, j + 1)]);
            r[m.index(i, j)] += f;
            r[m.index(i, j + 1)] -= f;
        }
    }
    return r;
}

WeightedSystem assemble(std::shared_ptr<const Mesh> mesh) { return WeightedSystem(std::move(mesh)); }

namespace {

std::vector<double> dirichlet_values(const Mesh& m, const BoundaryFunction& g) {
    std::vector<double> u(m.nodes(), 0.0);
    for (int i = 0; i <= m.Nx; ++i) u[m.index(i, m.My)] = g(m.x[i], m.y[m.My]);
    for (int j = 0; j < m.My; ++j) {
        u[m.index(0, j)] = g(m.x[0], m.y[j]);
        u[m.index(m.Nx, j)] = g(m.x[m.Nx], m.y[j]);
    }
    return u;
}

// Solves the reduced system with u's Dirichlet entries fixed; returns CG iterations.
long solve_into(const WeightedSystem& sys, std::vector<double>& u, std::span<const double> flux,
                const LinearSolveOptions& opts, bool use_guess) {
    const Mesh& m = sys.mesh();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.unknowns());
    Eigen::VectorXd x0(sys.unknowns());
    for (int j = 0; j < m.My; ++j) {
        for (int i = 1; i < m.Nx; ++i) {
            const int row = sys.unknown(i, j);
            double rhs = 0.0;
            if (j == 0) rhs += flux[i] * m.dual_x[i];
            if (sys.is_dirichlet(i - 1, j)) rhs += sys.cx(i - 1, j) * u[m.index(i - 1, j)];
            if (sys.is_dirichlet(i + 1, j)) rhs += sys.cx(i, j) * u[m.index(i + 1, j)];
            if (sys.is_dirichlet(i, j + 1)) rhs += sys.cy(i, j) * u[m.index(i, j + 1)];
            b[row] = rhs;
            x0[row] = use_guess ? u[m.index(i, j)] : 0.0;
        }
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(opts.cg_tol);
    cg.setMaxIterations(opts.cg_max_iter);
    cg.compute(sys.matrix());
    Eigen::VectorXd x = cg.solveWithGuess(b, x0);
    if (cg.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "conjugate gradients did not reach relative residual " << opts.cg_tol << " within "
            << opts.cg_max_iter << " iterations (reached " << cg.error() << ")";
        throw NumericalError(msg.str());
    }
    for (int j = 0; j < m.My; ++j) {
        for (int i = 1; i < m.Nx; ++i) u[m.index(i, j)] = x[sys.unknown(i, j)];
    }
    return static_cast<long>(cg.iterations());
}

}  // namespace

Field solve_linear(const WeightedSystem& system, const BoundaryFunction& dirichlet,
                   std::span<const double> flux, const Parameters& params,
                   const LinearSolveOptions& opts, const std::vector<double>* initial_guess) {
    const Mesh& m = system.mesh();
    if (flux.size() != m.x.size()) throw InvalidArgument("flux must have one value per trace node");
    for (double g : flux) {
        if (!std::isfinite(g)) throw InvalidArgument("flux values must be finite");
    }
    std::vector<double> u = dirichlet_values(m, dirichlet);
    bool guess = false;
    if (initial_guess != nullptr && initial_guess->size() == u.size()) {
        for (int j = 0; j < m.My; ++j) {
            for (int i = 1; i < m.Nx; ++i) u[m.index(i, j)] = (*initial_guess)[m.index(i, j)];
        }
        guess = true;
    }
    const long its = solve_into(system, u, flux, opts, guess);
    Field f(system.mesh_ptr(), params, std::move(u));
    f.report.iterations = 1;
    f.report.converged = true;
    f.report.cg_iterations = its;
    return f;
}

namespace {

double epsilon_for(const Mesh& m, const Parameters& p, const NonlinearSolveOptions& opts) {
    if (p.q != 1.0) return 0.0;
    return opts.epsilon.value_or(m.y[1]);
}

}  // namespace

Field solve_nonlinear(const WeightedSystem& system, const Parameters& params,
                      const BoundaryFunction& dirichlet, const NonlinearSolveOptions& opts) {
    params.validate();
    if (!(opts.omega > 0.0 && opts.omega <= 1.0)) throw InvalidArgument("damping must lie in (0,1]");
    if (!(opts.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    const Mesh& m = system.mesh();
    const double eps = epsilon_for(m, params, opts);

    std::vector<double> flux(m.x.size(), 0.0);
    std::vector<double> u = dirichlet_values(m, dirichlet);
    long cg_total = solve_into(system, u, flux, opts.linear, false);

    std::vector<double> trace(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(m.x.size()));
    SolveReport rep;
    rep.epsilon = eps;
    rep.omega = opts.omega;
    for (int it = 1; it <= opts.max_iter; ++it) {
        for (int i = 1; i < m.Nx; ++i) flux[i] = boundary_nonlinearity(trace[i], params, eps);
        cg_total += solve_into(system, u, flux, opts.linear, true);
        double change = 0.0;
        for (int i = 1; i < m.Nx; ++i) {
            const double next = (1.0 - opts.omega) * trace[i] + opts.omega * u[m.index(i, 0)];
            change = std::max(change, std::abs(next - trace[i]));
            trace[i] = next;
        }
        rep.iterations = it;
        rep.final_update = change;
        if (change <= opts.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.cg_iterations = cg_total;
    Field f(system.mesh_ptr(), params, std::move(u));
    f.report = rep;
    const Residual r = residual(f, params);
    f.report.interior_residual = r.interior;
    f.report.boundary_residual = r.boundary;
    return f;
}

Residual residual(const Field& field, const Parameters& params) {
    const Mesh& m = field.mesh();
    const WeightedSystem sys(field.mesh_ptr());
    const auto bal = sys.apply(field.values());
    Residual r;
    for (int j = 1; j < m.My; ++j) {
        for (int i = 1; i < m.Nx; ++i) r.interior = std::max(r.interior, std::abs(bal[m.index(i, j)]));
    }
    const double eps = field.report.epsilon;
    for (int i = 1; i < m.Nx; ++i) {
        const double u0 = field.value(i, 0);
        const double flux = -(field.value(i, 1) - u0) / m.yma_cell[0];
        r.boundary = std::max(r.boundary, std::abs(flux - boundary_nonlinearity(u0, params, eps)));
    }
    return r;
}

}  // namespace nodalset
