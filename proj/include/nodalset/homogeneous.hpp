#pragma once

#include <array>
#include <span>
#include <vector>

#include "nodalset/angular.hpp"

namespace nodalset {

/// u(X) = |X|^k phi(theta) built from an angular profile covering [0, pi].
class HomogeneousField {
public:
    HomogeneousField(AngularProfile profile, double k);

    double degree() const noexcept { return k_; }
    const AngularProfile& profile() const noexcept { return profile_; }

    double operator()(double x, double y) const;
    /// u(x, 0) = |x|^k phi(0) for x > 0 and |x|^k phi(pi) for x < 0.
    double trace(double x) const;

private:
    AngularProfile profile_;
    double k_;
    double phi0_;
    double phipi_;
};

HomogeneousField extend(const AngularProfile& profile, double k);

/// Even-in-y polynomial sum_m c_m x^{k-2m} y^{2m} annihilated by div(y^a grad).
struct SymmetricPoly {
    int degree = 0;
    double a = 0.0;
    std::vector<double> coeffs;   ///< c_0 = 1, c_1, ..., c_{floor(k/2)}

    double operator()(double x, double y) const;
    double dx(double x, double y) const;
    double dy(double x, double y) const;
    double dxx(double x, double y) const;
    double dyy(double x, double y) const;
};

/// The degree-k member of the symmetric L_a-harmonic class with leading
/// coefficient 1 on x^k.
SymmetricPoly sB_basis(double a, int k);

/// Largest coefficient of L_a p / y^a written in the monomial basis; zero
/// for an exactly harmonic coefficient list.
double recursion_residual(const SymmetricPoly& p);

/// max |y^a lap p + a y^{a-1} p_y| over the points, exact derivatives.
double la_residual(const SymmetricPoly& p, std::span<const std::array<double, 2>> points);

/// Same quantity with fourth-order central differences of step h.
double la_residual(const HomogeneousField& u, std::span<const std::array<double, 2>> points,
                   double h = 1e-3);

}  // namespace nodalset
