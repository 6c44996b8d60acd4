#pragma once

#include <vector>

#include "nodalset/params.hpp"

namespace nodalset {

/// State of the angular system in flux form: phi and w = sin^a(theta) phi'.
struct FluxState {
    double phi = 0.0;
    double w = 0.0;
};

/// Controls for the adaptive integrator of the flux system.
struct IntegratorOptions {
    double tol = 1e-12;        ///< absolute and relative local error tolerance
    double h0 = 1e-4;          ///< radius of the endpoint series zone
    double min_step = 1e-14;   ///< smallest accepted step before reporting underflow
    int samples = 4096;        ///< panels of the stored theta grid over [0, pi]
};

enum class Symmetry { none, antisymmetric, symmetric };

/// Solution of -(sin^a phi')' = mu sin^a phi sampled on a theta grid.
///
/// Between samples the profile is evaluated by re-integrating the flux
/// system from the nearest stored node, so evaluation accuracy equals the
/// integrator tolerance rather than an interpolation error.
class AngularProfile {
public:
    AngularProfile() = default;
    AngularProfile(double a, double mu, IntegratorOptions opts, Symmetry symmetry,
                   std::vector<double> theta, std::vector<double> phi, std::vector<double> w);

    double a() const noexcept { return a_; }
    double mu() const noexcept { return mu_; }
    Symmetry symmetry() const noexcept { return symmetry_; }
    const IntegratorOptions& options() const noexcept { return opts_; }

    const std::vector<double>& theta() const noexcept { return theta_; }
    const std::vector<double>& phi() const noexcept { return phi_; }
    const std::vector<double>& w() const noexcept { return w_; }

    double theta_begin() const { return theta_.front(); }
    double theta_end() const { return theta_.back(); }
    FluxState front() const { return {phi_.front(), w_.front()}; }
    FluxState back() const { return {phi_.back(), w_.back()}; }

    /// Evaluates (phi, w) at any theta in [theta_begin, theta_end].
    FluxState state_at(double theta) const;
    double phi_at(double theta) const { return state_at(theta).phi; }

    /// Interior points where pieces were glued (empty for single-piece profiles).
    std::vector<double> glue_points;
    /// Largest flux mismatch measured at the glue points.
    double glue_jump = 0.0;
    /// phi(0) for constructed profiles (A_1 or A_2).
    double amplitude = 0.0;

private:
    double a_ = 0.0;
    double mu_ = 0.0;
    IntegratorOptions opts_{};
    Symmetry symmetry_ = Symmetry::none;
    std::vector<double> theta_;
    std::vector<double> phi_;
    std::vector<double> w_;
};

/// Propagates the flux system from theta0 to theta1 (either direction).
///
/// Inside the endpoint zones [0, h0) and (pi - h0, pi] the local series
/// phi ~ phi_e + w_e t^{1-a}/(1-a) + ... (t = distance to the endpoint) is
/// used instead of Runge-Kutta steps.
FluxState propagate_flux(double a, double mu, double theta0, double theta1, FluxState init,
                         const IntegratorOptions& opts = {});

/// Integrates the flux system on [theta0, theta1] and stores a uniform sample
/// grid with about opts.samples panels per pi.
AngularProfile integrate_flux_system(double a, double mu, double theta0, double theta1,
                                     FluxState init, const IntegratorOptions& opts = {});

enum class EigenProblem { mixed, dirichlet };

struct EigenResult {
    double eigenvalue = 0.0;   ///< the raw angular eigenvalue
    double k1 = 0.0;           ///< characteristic exponent, k1 (k1 + a) = eigenvalue
    AngularProfile eigenfunction;
    double T = 0.0;
    double a = 0.0;
    EigenProblem kind = EigenProblem::mixed;
};

/// Positive root k of k (k + a) = eigenvalue.
double characteristic_exponent(double eigenvalue, double a);

/// First eigenvalue on (0, T) with w(0) = 0 and phi(T) = 0.
EigenResult eigen_mixed(double T, double a, double tol = 1e-13, const IntegratorOptions& opts = {});

/// First eigenvalue on (T, pi - T) with Dirichlet conditions at both ends.
EigenResult eigen_dirichlet(double T, double a, double tol = 1e-13,
                            const IntegratorOptions& opts = {});

/// T in (0, pi/2) with k1(eigen_dirichlet(T, a)) = k_q.
double find_Tstar(double a, double k_q, double tol = 1e-10, const IntegratorOptions& opts = {});

/// Scale c such that c * psi satisfies -w(0) = lambda_+ phi(0)^{q-1} when the
/// normalized profile psi has psi(0) = 1 and weighted flux w0_normalized < 0.
double nonlinear_amplitude(double a, double q, double lambda_plus, double w0_normalized);

/// Odd-about-pi/2 profile phi_1 for lambda_+ = lambda_- and k_q < 1.
AngularProfile build_antisymmetric(const Parameters& p, const DerivedExponents& d,
                                   const IntegratorOptions& opts = {});

/// Even-about-pi/2 profile phi_2 with sign pattern (+,-,+), glued at T*.
AngularProfile build_symmetric(const Parameters& p, const DerivedExponents& d,
                               const IntegratorOptions& opts = {});

/// Largest |w' + mu sin^a phi| over interior sample nodes, with w' from
/// central differences of the stored flux. Nodes within `exclusion` of a glue
/// point or of the interval ends are skipped.
double ode_residual(const AngularProfile& profile, double exclusion = 0.0);

}  // namespace nodalset
