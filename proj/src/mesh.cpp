#include "nodalset/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nodalset/errors.hpp"

namespace nodalset {

double weight_integral(double y1, double y2, double p) {
    return (std::pow(y2, p + 1.0) - std::pow(y1, p + 1.0)) / (p + 1.0);
}

double default_grading(double a) { return a >= 0.0 ? 2.0 / (1.0 - a) : 1.0; }

Mesh build_mesh(double L, double Y, int Nx, int My, double gamma, double a) {
    if (!(a > -1.0 && a < 1.0)) throw InvalidArgument("mesh weight exponent must lie in (-1,1)");
    if (!(L > 0.0) || !(Y > 0.0)) throw InvalidArgument("mesh extents must be positive");
    if (Nx < 8 || My < 8) throw InvalidArgument("mesh needs at least 8 cells per direction");
    if (!(gamma >= 1.0)) throw InvalidArgument("grading exponent must be >= 1");

    Mesh m;
    m.L = L;
    m.Y = Y;
    m.Nx = Nx;
    m.My = My;
    m.gamma = gamma;
    m.a = a;
    m.x.resize(Nx + 1);
    for (int i = 0; i <= Nx; ++i) m.x[i] = -L + 2.0 * L * i / Nx;
    m.x.back() = L;
    m.y.resize(My + 1);
    for (int j = 0; j <= My; ++j) m.y[j] = Y * std::pow(static_cast<double>(j) / My, gamma);
    m.y.front() = 0.0;
    m.y.back() = Y;

    m.ya_cell.resize(My);
    m.yma_cell.resize(My);
    m.ya_lower.resize(My);
    m.ya_upper.resize(My);
    for (int j = 0; j < My; ++j) {
        const double y0 = m.y[j];
        const double y1 = m.y[j + 1];
        const double ym = 0.5 * (y0 + y1);
        m.ya_cell[j] = weight_integral(y0, y1, a);
        m.yma_cell[j] = weight_integral(y0, y1, -a);
        m.ya_lower[j] = weight_integral(y0, ym, a);
        m.ya_upper[j] = weight_integral(ym, y1, a);
    }
    m.ya_row.assign(My + 1, 0.0);
    for (int j = 0; j < My; ++j) {
        m.ya_row[j] += m.ya_lower[j];
        m.ya_row[j + 1] += m.ya_upper[j];
    }
    m.dual_x.assign(Nx + 1, 0.0);
    for (int i = 0; i < Nx; ++i) {
        const double h = m.x[i + 1] - m.x[i];
        m.dual_x[i] += 0.5 * h;
        m.dual_x[i + 1] += 0.5 * h;
    }
    for (int j = 0; j < My; ++j) {
        if (!(m.yma_cell[j] > 0.0) || !std::isfinite(m.yma_cell[j]) || !(m.ya_cell[j] > 0.0)) {
            std::ostringstream msg;
            msg << "degenerate weight integral in y-cell " << j;
            throw NumericalError(msg.str());
        }
    }
    return m;
}

int Mesh::locate_x(double xv) const {
    const auto it = std::upper_bound(x.begin(), x.end(), xv);
    int i = static_cast<int>(it - x.begin()) - 1;
    return std::clamp(i, 0, Nx - 1);
}

int Mesh::locate_y(double yv) const {
    const auto it = std::upper_bound(y.begin(), y.end(), yv);
    int j = static_cast<int>(it - y.begin()) - 1;
    return std::clamp(j, 0, My - 1);
}

Field::Field(std::shared_ptr<const Mesh> mesh, Parameters params, std::vector<double> values)
    : mesh_(std::move(mesh)), params_(params), values_(std::move(values)) {
    if (!mesh_) throw InvalidArgument("field needs a mesh");
    if (values_.size() != mesh_->nodes()) throw InvalidArgument("field size does not match mesh");
    for (double v : values_) {
        if (!std::isfinite(v)) throw NumericalError("field contains non-finite values");
    }
}

bool Field::contains(double x, double y) const {
    return x >= mesh_->x.front() && x <= mesh_->x.back() && y >= 0.0 && y <= mesh_->y.back();
}

double Field::operator()(double x, double y) const {
    const Mesh& m = *mesh_;
    const int i = m.locate_x(x);
    const int j = m.locate_y(y);
    const double tx = (x - m.x[i]) / (m.x[i + 1] - m.x[i]);
    const double ty = (y - m.y[j]) / (m.y[j + 1] - m.y[j]);
    const double u00 = value(i, j);
    const double u10 = value(i + 1, j);
    const double u01 = value(i, j + 1);
    const double u11 = value(i + 1, j + 1);
    return (1 - tx) * (1 - ty) * u00 + tx * (1 - ty) * u10 + (1 - tx) * ty * u01 + tx * ty * u11;
}

std::array<double, 2> Field::gradient(double x, double y) const {
    const Mesh& m = *mesh_;
    const int i = m.locate_x(x);
    const int j = m.locate_y(y);
    const double hx = m.x[i + 1] - m.x[i];
    const double hy = m.y[j + 1] - m.y[j];
    const double tx = (x - m.x[i]) / hx;
    const double ty = (y - m.y[j]) / hy;
    const double u00 = value(i, j);
    const double u10 = value(i + 1, j);
    const double u01 = value(i, j + 1);
    const double u11 = value(i + 1, j + 1);
    const double ux = ((1 - ty) * (u10 - u00) + ty * (u11 - u01)) / hx;
    const double uy = ((1 - tx) * (u01 - u00) + tx * (u11 - u10)) / hy;
    return {ux, uy};
}

std::vector<double> Field::trace_values() const {
    return {values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(mesh_->x.size())};
}

Field sample_field(std::shared_ptr<const Mesh> mesh, const std::function<double(double, double)>& u,
                   const Parameters& params) {
    std::vector<double> v(mesh->nodes());
    for (int j = 0; j <= mesh->My; ++j) {
        for (int i = 0; i <= mesh->Nx; ++i) v[mesh->index(i, j)] = u(mesh->x[i], mesh->y[j]);
    }
    return Field(std::move(mesh), params, std::move(v));
}

}  // namespace nodalset
