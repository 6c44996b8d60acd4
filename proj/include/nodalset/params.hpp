#pragma once

namespace nodalset {

/// Problem data for the two-phase sublinear boundary problem.
///
/// Construction validates 0 < s < 1, 1 <= q < 2, lambda_plus >= 0,
/// lambda_minus >= 0 and n >= 1. Only n = 1 is solvable, but the
/// functional normalizations read n from here.
struct Parameters {
    double s = 0.25;
    double q = 1.0;
    double lambda_plus = 1.0;
    double lambda_minus = 1.0;
    int n = 1;

    static Parameters make(double s, double q, double lambda_plus, double lambda_minus, int n = 1);

    /// Throws InvalidArgument when an invariant is violated.
    void validate() const;

    /// a = 1 - 2s
    double weight_exponent() const noexcept { return 1.0 - 2.0 * s; }
};

/// Exponents derived from Parameters.
struct DerivedExponents {
    double a = 0.0;       ///< 1 - 2s
    double k_q = 0.0;     ///< 2s / (2 - q), the critical vanishing order
    int beta_q = 0;       ///< largest integer strictly below k_q
    double mu = 0.0;      ///< k_q (k_q + 1 - 2s)
};

/// Tolerance used to decide whether k_q is an integer.
inline constexpr double kIntegerTolerance = 1e-12;

DerivedExponents derive_exponents(const Parameters& p);

/// 2n - t (n - 2s). For t = 2 this is nonpositive after subtracting
/// 2k(2 - q) exactly when k >= 2s / (2 - q).
double critical_constant(int n, double t, double s);

/// Boundary nonlinearity lambda_+ t_+^{q-1} - lambda_- t_-^{q-1}.
///
/// For q = 1 and epsilon > 0 the sign jump is replaced by a linear ramp of
/// width epsilon; epsilon = 0 gives the sign function with f(0) = 0.
double boundary_nonlinearity(double t, const Parameters& p, double epsilon = 0.0);

/// F(t) = lambda_+ t_+^q + lambda_- t_-^q.
double F_value(double t, const Parameters& p);

}  // namespace nodalset
