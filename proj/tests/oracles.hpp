#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

/// int_0^pi sin^a = sqrt(pi) Gamma((a+1)/2) / Gamma(a/2 + 1).
inline double sin_power_integral(double a) {
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (a + 1.0)) / std::tgamma(0.5 * a + 1.0);
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix (d, e) by Sturm
/// sequence bisection.
inline double smallest_tridiagonal_eigenvalue(const std::vector<double>& d, const std::vector<double>& e) {
    const std::size_t n = d.size();
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double off = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - off);
        hi = std::max(hi, d[i] + off);
    }
    auto below = [&](double x) {
        int count = 0;
        double q = d[0] - x;
        if (q < 0) ++count;
        for (std::size_t i = 1; i < n; ++i) {
            if (q == 0.0) q = 1e-300;
            q = d[i] - x - e[i - 1] * e[i - 1] / q;
            if (q < 0) ++count;
        }
        return count;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (below(mid) >= 1) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// First eigenvalue of -(sin^a phi')' = mu sin^a phi on (T, pi - T) with
/// Dirichlet ends, by vertex-centred finite differences with n cells on
/// (T, pi/2) and a half-cell symmetry row at pi/2.
inline double fd_dirichlet_eigenvalue(double T, double a, int n) {
    const double h = (std::numbers::pi / 2 - T) / n;
    std::vector<double> d(n), e(n - 1), rho(n);
    for (int i = 1; i <= n; ++i) {
        const double pl = std::pow(std::sin(T + (i - 0.5) * h), a);
        const double pr = i < n ? std::pow(std::sin(T + (i + 0.5) * h), a) : 0.0;
        rho[i - 1] = std::pow(std::sin(T + i * h), a) * (i < n ? 1.0 : 0.5);
        d[i - 1] = (pl + pr) / (h * h);
        if (i < n) e[i - 1] = -pr / (h * h);
    }
    for (int i = 0; i < n; ++i) d[i] /= rho[i];
    for (int i = 0; i + 1 < n; ++i) e[i] /= std::sqrt(rho[i] * rho[i + 1]);
    return smallest_tridiagonal_eigenvalue(d, e);
}

/// First eigenvalue on (0, T) with zero weighted flux at 0 and phi(T) = 0,
/// cell-centred so that sin^a is never evaluated at 0.
inline double fd_mixed_eigenvalue(double T, double a, int n) {
    const double h = T / n;
    std::vector<double> d(n), e(n - 1), rho(n);
    for (int i = 0; i < n; ++i) {
        const double pl = i > 0 ? std::pow(std::sin(i * h), a) : 0.0;
        const double pr = std::pow(std::sin((i + 1) * h), a);
        rho[i] = std::pow(std::sin((i + 0.5) * h), a);
        d[i] = (pl + (i + 1 < n ? pr : 2.0 * pr)) / (h * h);
        if (i + 1 < n) e[i] = -pr / (h * h);
    }
    for (int i = 0; i < n; ++i) d[i] /= rho[i];
    for (int i = 0; i + 1 < n; ++i) e[i] /= std::sqrt(rho[i] * rho[i + 1]);
    return smallest_tridiagonal_eigenvalue(d, e);
}

/// Positive root of k (k + a) = mu, solved independently of the library.
inline double exponent_from_eigenvalue(double mu, double a) {
    return 0.5 * (-a + std::sqrt(a * a + 4.0 * mu));
}

}  // namespace oracle
