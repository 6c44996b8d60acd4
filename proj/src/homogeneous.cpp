#include "nodalset/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nodalset/errors.hpp"

namespace nodalset {

HomogeneousField::HomogeneousField(AngularProfile profile, double k)
    : profile_(std::move(profile)), k_(k) {
    if (!(k > 0.0)) throw InvalidArgument("homogeneity degree must be positive");
    if (profile_.theta_begin() != 0.0 || profile_.theta_end() != std::numbers::pi) {
        throw InvalidArgument("profile must cover [0, pi]");
    }
    phi0_ = profile_.front().phi;
    phipi_ = profile_.back().phi;
}

double HomogeneousField::operator()(double x, double y) const {
    const double r = std::hypot(x, y);
    if (r == 0.0) return 0.0;
    const double theta = std::clamp(std::atan2(std::max(y, 0.0), x), 0.0, std::numbers::pi);
    return std::pow(r, k_) * profile_.phi_at(theta);
}

double HomogeneousField::trace(double x) const {
    if (x == 0.0) return 0.0;
    return std::pow(std::abs(x), k_) * (x > 0.0 ? phi0_ : phipi_);
}

HomogeneousField extend(const AngularProfile& profile, double k) { return HomogeneousField(profile, k); }

SymmetricPoly sB_basis(double a, int k) {
    if (k < 0) throw InvalidArgument("polynomial degree must be nonnegative");
    SymmetricPoly p;
    p.degree = k;
    p.a = a;
    p.coeffs.push_back(1.0);
    for (int m = 0; 2 * (m + 1) <= k; ++m) {
        const double num = static_cast<double>(k - 2 * m) * (k - 2 * m - 1);
        const double den = static_cast<double>(2 * m + 2) * (2 * m + 1 + a);
        p.coeffs.push_back(-p.coeffs.back() * num / den);
    }
    return p;
}

namespace {

double ipow(double v, int e) { return e <= 0 ? 1.0 : std::pow(v, e); }

}  // namespace

double SymmetricPoly::operator()(double x, double y) const {
    double s = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        s += coeffs[m] * ipow(x, degree - 2 * static_cast<int>(m)) * ipow(y, 2 * static_cast<int>(m));
    }
    return s;
}

double SymmetricPoly::dx(double x, double y) const {
    double s = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        const int px = degree - 2 * static_cast<int>(m);
        if (px > 0) s += coeffs[m] * px * ipow(x, px - 1) * ipow(y, 2 * static_cast<int>(m));
    }
    return s;
}

double SymmetricPoly::dy(double x, double y) const {
    double s = 0.0;
    for (std::size_t m = 1; m < coeffs.size(); ++m) {
        const int py = 2 * static_cast<int>(m);
        s += coeffs[m] * py * ipow(x, degree - py) * ipow(y, py - 1);
    }
    return s;
}

double SymmetricPoly::dxx(double x, double y) const {
    double s = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        const int px = degree - 2 * static_cast<int>(m);
        if (px > 1) s += coeffs[m] * px * (px - 1) * ipow(x, px - 2) * ipow(y, 2 * static_cast<int>(m));
    }
    return s;
}

double SymmetricPoly::dyy(double x, double y) const {
    double s = 0.0;
    for (std::size_t m = 1; m < coeffs.size(); ++m) {
        const int py = 2 * static_cast<int>(m);
        s += coeffs[m] * py * (py - 1) * ipow(x, degree - py) * ipow(y, py - 2);
    }
    return s;
}

double recursion_residual(const SymmetricPoly& p) {
    // L_a(x^i y^j) / y^a = i(i-1) x^{i-2} y^j + j(j-1+a) x^i y^{j-2}.
    double worst = 0.0;
    const int mmax = static_cast<int>(p.coeffs.size()) - 1;
    for (int m = 0; m <= mmax; ++m) {
        // coefficient of x^{k-2m-2} y^{2m}
        const int i = p.degree - 2 * m;
        double c = i >= 2 ? p.coeffs[m] * i * (i - 1) : 0.0;
        if (m + 1 <= mmax) c += p.coeffs[m + 1] * (2 * m + 2) * (2 * m + 1 + p.a);
        worst = std::max(worst, std::abs(c));
    }
    return worst;
}

double la_residual(const SymmetricPoly& p, std::span<const std::array<double, 2>> points) {
    double worst = 0.0;
    for (const auto& pt : points) {
        const double x = pt[0];
        const double y = pt[1];
        if (!(y > 0.0)) throw InvalidArgument("la_residual needs points with y > 0");
        const double r = std::pow(y, p.a) * (p.dxx(x, y) + p.dyy(x, y)) + p.a * std::pow(y, p.a - 1.0) * p.dy(x, y);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double la_residual(const HomogeneousField& u, std::span<const std::array<double, 2>> points, double h) {
    const double a = u.profile().a();
    double worst = 0.0;
    for (const auto& pt : points) {
        const double x = pt[0];
        const double y = pt[1];
        if (!(y > 2.0 * h)) throw InvalidArgument("la_residual needs points with y > 2h");
        const double c = u(x, y);
        const double xp1 = u(x + h, y), xm1 = u(x - h, y), xp2 = u(x + 2 * h, y), xm2 = u(x - 2 * h, y);
        const double yp1 = u(x, y + h), ym1 = u(x, y - h), yp2 = u(x, y + 2 * h), ym2 = u(x, y - 2 * h);
        const double uxx = (-xp2 + 16 * xp1 - 30 * c + 16 * xm1 - xm2) / (12 * h * h);
        const double uyy = (-yp2 + 16 * yp1 - 30 * c + 16 * ym1 - ym2) / (12 * h * h);
        const double uy = (-yp2 + 8 * yp1 - 8 * ym1 + ym2) / (12 * h);
        const double r = std::pow(y, a) * (uxx + uyy) + a * std::pow(y, a - 1.0) * uy;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace nodalset
