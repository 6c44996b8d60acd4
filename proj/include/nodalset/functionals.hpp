#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nodalset/mesh.hpp"
#include "nodalset/params.hpp"

namespace nodalset {

/// Samples of a field on the half-circle of radius r about (x0, 0).
///
/// Composite midpoint rule in theta: n_theta panels, weights pi / n_theta
/// summing to pi; the endpoints 0 and pi are never evaluated.
struct SphereSamples {
    double x0 = 0.0;
    double r = 0.0;
    std::vector<double> theta;
    std::vector<double> weight;   ///< quadrature weights in theta
    std::vector<double> sin_a;    ///< sin^a(theta)
    std::vector<double> u;
    std::vector<double> du_dr;
};

struct QuadratureOptions {
    int n_theta = 256;
    double h_floor = 1e-24;   ///< H below this makes quotients by H an error
};

/// Throws InvalidArgument if the half-disk does not fit one cell inside the mesh.
void check_radius(const Field& f, double x0, double r);

SphereSamples sphere_samples(const Field& f, double x0, double r, int n_theta = 256);

/// r^{-(n+a)} int_{half circle} y^a u^2 dsigma.
double H_val(const Field& f, double x0, double r, int n_theta = 256);

/// int_{B_r^+(x0)} y^a |grad u|^2 with the scheme-consistent cell energy,
/// cells crossing the circle weighted by their y^a-weighted covered fraction.
double bulk_energy(const Field& f, double x0, double r);

/// int_{x0-r}^{x0+r} F(u(x,0)) dx on the piecewise-linear trace.
double trace_F_integral(const Field& f, double x0, double r, const Parameters& p);

/// r^{-(n+a-1)} [ bulk energy - (t/q) int F ].
double E_t_val(const Field& f, double x0, double r, double t, const Parameters& p);

/// E_t / H; throws DegenerateDenominator when H <= opts.h_floor.
double N_t_val(const Field& f, double x0, double r, double t, const Parameters& p,
               const QuadratureOptions& opts = {});

/// (E_t - k H) / r^{2k}.
double W_val(const Field& f, double x0, double r, double k, double t, const Parameters& p,
             int n_theta = 256);

/// r^{-(n+a+2k)} int_{half circle} y^a (u - poly(X - X0))^2 dsigma.
double monneau_val(const Field& f, double x0, const std::function<double(double, double)>& poly,
                   double r, double k, int n_theta = 256);

/// What a FunctionalCurve should tabulate besides H, E_q, E_2, N_q, N_2.
struct CurveRequest {
    std::vector<double> extra_t;                    ///< additional E_t columns
    std::vector<std::pair<double, double>> weiss;   ///< (k, t) pairs for W_{k,t}
    std::function<double(double, double)> monneau_poly;   ///< optional comparison polynomial
    double monneau_k = 1.0;
    int n_theta = 256;
    double h_floor = 1e-24;
};

/// Per-radius table of the monotonicity functionals.
///
/// Rows whose radius was inadmissible carry `flagged` and NaN values.
/// dH/dr uses the three-point formula on neighbouring radii; the first and
/// last rows (and every row of a single-radius curve) have NaN derivatives.
struct FunctionalCurve {
    double x0 = 0.0;
    std::vector<double> r;
    std::vector<double> H;
    std::vector<double> E_q;
    std::vector<double> E_2;
    std::vector<double> N_q;
    std::vector<double> N_2;
    std::vector<double> trace_F;                       ///< int_{x0-r}^{x0+r} F(u)
    std::vector<std::pair<double, std::vector<double>>> E_t;   ///< extra t columns
    std::vector<std::pair<std::pair<double, double>, std::vector<double>>> W;
    std::vector<double> monneau;                       ///< empty when no polynomial given
    std::vector<double> dHdr;
    std::vector<double> defect;                        ///< |dH/dr - 2 E_q / r|
    std::vector<bool> flagged;
    std::vector<std::string> notes;

    std::size_t size() const noexcept { return r.size(); }
    /// W_{k,t} column; throws InvalidArgument when absent.
    const std::vector<double>& weiss_column(double k, double t) const;
};

FunctionalCurve curve(const Field& f, double x0, const std::vector<double>& radii,
                      const CurveRequest& request, const Parameters& p);

enum class MonotonicityKind { weiss_k2, almgren_perturbed };

struct MonotonicityParams {
    double k = 0.0;        ///< weiss_k2
    double C_tilde = 0.0;  ///< almgren_perturbed
    double alpha = 1.0;    ///< almgren_perturbed
};

struct MonotonicityReport {
    std::vector<double> monitored;
    double max_decrease = 0.0;
    double scale = 0.0;                 ///< max |monitored|
    bool pass = false;
    /// Largest radius r0 such that no decrease above tolerance occurs on radii <= r0.
    double monotone_up_to = 0.0;
};

MonotonicityReport check_monotonicity(const FunctionalCurve& c, MonotonicityKind kind,
                                      const MonotonicityParams& params, double tolerance);

/// Constants for the perturbed Almgren quotient exp(C r^alpha)(N_q + 1).
///
/// alpha = delta / 2 with delta = k_q - observed_order. C is the smallest
/// constant whose derivative C alpha r^{alpha-1} dominates the lower bound
/// (C_{n,q}/q) r^{-(n+a)} int F / (E_q + H) on every curve radius.
MonotonicityParams almgren_constants(const FunctionalCurve& c, const Parameters& p,
                                     double observed_order);

}  // namespace nodalset
