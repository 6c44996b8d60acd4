#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "nodalset/params.hpp"

namespace nodalset {

/// Tensor grid on [-L, L] x [0, Y] with y-nodes graded as Y (j/M)^gamma.
///
/// Nodes are numbered row by row: index(i, j) = j * (Nx + 1) + i, with j = 0
/// the trace row. All weight integrals are closed-form.
struct Mesh {
    double L = 1.0;
    double Y = 1.0;
    int Nx = 0;
    int My = 0;
    double gamma = 1.0;
    double a = 0.0;

    std::vector<double> x;   ///< Nx + 1 abscissae
    std::vector<double> y;   ///< My + 1 ordinates, y[0] == 0

    std::vector<double> ya_cell;     ///< int_{y_j}^{y_{j+1}} y^a, per y-cell
    std::vector<double> yma_cell;    ///< int_{y_j}^{y_{j+1}} y^{-a}, per y-cell
    std::vector<double> ya_lower;    ///< int_{y_j}^{y_{j+1/2}} y^a, per y-cell
    std::vector<double> ya_upper;    ///< int_{y_{j+1/2}}^{y_{j+1}} y^a, per y-cell
    std::vector<double> ya_row;      ///< dual-row weight int_{y_{j-1/2}}^{y_{j+1/2}} y^a, per y-node
    std::vector<double> dual_x;      ///< dual-cell width in x, per x-node

    std::size_t nodes() const noexcept { return x.size() * y.size(); }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * x.size() + static_cast<std::size_t>(i);
    }
    /// Cell containing x (clamped to the grid).
    int locate_x(double xv) const;
    int locate_y(double yv) const;
};

/// int_{y1}^{y2} y^p dy for p > -1.
double weight_integral(double y1, double y2, double p);

/// Default grading: 2 / (1 - a) for a >= 0, 1 otherwise.
double default_grading(double a);

Mesh build_mesh(double L, double Y, int Nx, int My, double gamma, double a);

/// Diagnostics of a boundary-value solve.
struct SolveReport {
    int iterations = 0;              ///< fixed-point iterations (1 for linear solves)
    double final_update = 0.0;       ///< sup-norm of the last trace change
    bool converged = false;
    double interior_residual = 0.0;
    double boundary_residual = 0.0;
    double epsilon = 0.0;            ///< q = 1 smoothing width actually used
    double omega = 1.0;
    long cg_iterations = 0;          ///< total CG iterations over all linear solves
};

/// Nodal field on a Mesh with a bilinear evaluator.
class Field {
public:
    Field(std::shared_ptr<const Mesh> mesh, Parameters params, std::vector<double> values);

    const Mesh& mesh() const noexcept { return *mesh_; }
    std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }
    const Parameters& params() const noexcept { return params_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double value(int i, int j) const { return values_[mesh_->index(i, j)]; }

    /// Bilinear interpolation; agrees with nodal values at nodes.
    double operator()(double x, double y) const;
    /// Gradient of the bilinear interpolant (cell-wise).
    std::array<double, 2> gradient(double x, double y) const;
    /// Trace u(x, 0), piecewise linear.
    double trace(double x) const { return (*this)(x, 0.0); }
    std::vector<double> trace_values() const;

    bool contains(double x, double y) const;

    SolveReport report{};

private:
    std::shared_ptr<const Mesh> mesh_;
    Parameters params_;
    std::vector<double> values_;
};

/// Samples an analytic function at the mesh nodes.
Field sample_field(std::shared_ptr<const Mesh> mesh, const std::function<double(double, double)>& u,
                   const Parameters& params);

}  // namespace nodalset
