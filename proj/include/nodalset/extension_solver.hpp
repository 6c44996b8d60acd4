#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "nodalset/mesh.hpp"
#include "nodalset/params.hpp"

namespace nodalset {

/// Dirichlet data g(x, y), read on the top row and both side columns.
using BoundaryFunction = std::function<double(double, double)>;

/// Finite-volume discretization of div(y^a grad u) on a Mesh.
///
/// Vertical fluxes use (u_{j+1} - u_j) / int y^{-a}, so the scheme is exact on
/// profiles with constant weighted flux y^a u_y. Horizontal fluxes use the
/// difference quotient scaled by the dual-row weight int y^a. Unknowns are the
/// nodes off the top row and the side columns; the trace row carries the
/// Neumann balance.
class WeightedSystem {
public:
    explicit WeightedSystem(std::shared_ptr<const Mesh> mesh);

    const Mesh& mesh() const noexcept { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }

    /// Horizontal coupling between (i, j) and (i + 1, j).
    double cx(int i, int j) const { return cx_[static_cast<std::size_t>(j) * mesh_->Nx + i]; }
    /// Vertical coupling between (i, j) and (i, j + 1).
    double cy(int i, int j) const { return cy_[static_cast<std::size_t>(j) * (mesh_->Nx + 1) + i]; }

    bool is_dirichlet(int i, int j) const { return unknown_[mesh_->index(i, j)] < 0; }
    int unknown(int i, int j) const { return unknown_[mesh_->index(i, j)]; }
    int unknowns() const noexcept { return n_unknowns_; }

    /// Row balance sum_nbr c (u_c - u_nbr) at every node (full nodal vector).
    std::vector<double> apply(std::span<const double> u) const;

    const Eigen::SparseMatrix<double>& matrix() const noexcept { return K_; }

private:
    std::shared_ptr<const Mesh> mesh_;
    std::vector<double> cx_;
    std::vector<double> cy_;
    std::vector<int> unknown_;
    int n_unknowns_ = 0;
    Eigen::SparseMatrix<double> K_;
};

WeightedSystem assemble(std::shared_ptr<const Mesh> mesh);

struct LinearSolveOptions {
    double cg_tol = 1e-10;      ///< relative residual target
    int cg_max_iter = 100000;
};

/// Solves with Dirichlet data on top/sides and trace flux g = -y^a u_y at the
/// trace nodes (flux.size() == Nx + 1). Throws NumericalError when CG stalls.
Field solve_linear(const WeightedSystem& system, const BoundaryFunction& dirichlet,
                   std::span<const double> flux, const Parameters& params,
                   const LinearSolveOptions& opts = {},
                   const std::vector<double>* initial_guess = nullptr);

struct NonlinearSolveOptions {
    double omega = 0.7;
    double tol = 1e-10;
    int max_iter = 500;
    /// q = 1 smoothing width; nullopt means the first y-cell height.
    std::optional<double> epsilon;
    LinearSolveOptions linear{1e-13, 100000};
};

/// Damped fixed-point iteration on the trace for -y^a u_y = f(u).
/// Non-convergence is reported in Field::report, not thrown.
Field solve_nonlinear(const WeightedSystem& system, const Parameters& params,
                      const BoundaryFunction& dirichlet, const NonlinearSolveOptions& opts = {});

struct Residual {
    double interior = 0.0;
    double boundary = 0.0;
};

/// interior: max |row balance| over nodes strictly inside (j >= 1);
/// boundary: max over interior trace nodes of |-(u_{i,1} - u_{i,0}) / int_0^{y_1} y^{-a} - f(u_{i,0})|,
/// with f smoothed by the field's recorded epsilon.
Residual residual(const Field& field, const Parameters& params);

}  // namespace nodalset
