#include "nodalset/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nodalset/errors.hpp"

namespace nodalset {

Parameters Parameters::make(double s, double q, double lambda_plus, double lambda_minus, int n) {
    Parameters p{s, q, lambda_plus, lambda_minus, n};
    p.validate();
    return p;
}

void Parameters::validate() const {
    std::ostringstream msg;
    if (!(s > 0.0 && s < 1.0)) {
        msg << "s must lie in (0,1), got " << s;
    } else if (!(q >= 1.0 && q < 2.0)) {
        msg << "q must lie in [1,2), got " << q;
    } else if (!(lambda_plus >= 0.0) || !std::isfinite(lambda_plus)) {
        msg << "lambda_plus must be finite and >= 0, got " << lambda_plus;
    } else if (!(lambda_minus >= 0.0) || !std::isfinite(lambda_minus)) {
        msg << "lambda_minus must be finite and >= 0, got " << lambda_minus;
    } else if (n < 1) {
        msg << "n must be a positive integer, got " << n;
    } else {
        return;
    }
    throw InvalidArgument(msg.str());
}

DerivedExponents derive_exponents(const Parameters& p) {
    p.validate();
    DerivedExponents d;
    d.a = 1.0 - 2.0 * p.s;
    d.k_q = 2.0 * p.s / (2.0 - p.q);
    const double nearest = std::round(d.k_q);
    if (std::abs(d.k_q - nearest) <= kIntegerTolerance) {
        d.beta_q = static_cast<int>(nearest) - 1;
    } else {
        d.beta_q = static_cast<int>(std::floor(d.k_q));
    }
    d.mu = d.k_q * (d.k_q + 1.0 - 2.0 * p.s);
    return d;
}

double critical_constant(int n, double t, double s) {
    if (n < 1 || !(t >= 1.0 && t <= 2.0) || !(s > 0.0 && s < 1.0)) {
        throw InvalidArgument("critical_constant requires n >= 1, t in [1,2], s in (0,1)");
    }
    return 2.0 * n - t * (n - 2.0 * s);
}

double boundary_nonlinearity(double t, const Parameters& p, double epsilon) {
    if (p.q == 1.0) {
        if (epsilon > 0.0) {
            return p.lambda_plus * std::clamp(t / epsilon, 0.0, 1.0) -
                   p.lambda_minus * std::clamp(-t / epsilon, 0.0, 1.0);
        }
        if (t > 0.0) return p.lambda_plus;
        if (t < 0.0) return -p.lambda_minus;
        return 0.0;
    }
    const double e = p.q - 1.0;
    if (t > 0.0) return p.lambda_plus * std::pow(t, e);
    if (t < 0.0) return -p.lambda_minus * std::pow(-t, e);
    return 0.0;
}

double F_value(double t, const Parameters& p) {
    if (t > 0.0) return p.lambda_plus * std::pow(t, p.q);
    if (t < 0.0) return p.lambda_minus * std::pow(-t, p.q);
    return 0.0;
}

}  // namespace nodalset
