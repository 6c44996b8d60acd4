#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nodalset/functionals.hpp"
#include "nodalset/homogeneous.hpp"
#include "nodalset/mesh.hpp"
#include "nodalset/params.hpp"

namespace nodalset {

enum class NodalKind { crossing, tangential, interval_endpoint };
enum class Stratum { regular, singular, sublinear, unclassified };

const char* to_string(NodalKind k);
const char* to_string(Stratum s);

/// A point of the trace zero set together with what the classifier found.
struct NodalPoint {
    double x0 = 0.0;
    NodalKind kind = NodalKind::crossing;
    double order = 0.0;               ///< NaN until estimated
    double order_uncertainty = 0.0;
    Stratum stratum = Stratum::unclassified;
    int degree = 0;                   ///< integer order for regular/singular
    double trace_slope = 0.0;
    double tangent_coefficient = 0.0; ///< NaN when no fit was made
    /// Both readings when k_q sits within 2 tol of an admissible integer.
    std::vector<std::string> candidates;
    std::string note;
};

struct NodalScan {
    std::vector<NodalPoint> points;
    /// Runs of trace nodes below the zero tolerance; a nontrivial solution has none.
    std::vector<std::pair<double, double>> zero_intervals;
    double zero_tolerance = 0.0;
};

/// Scans the piecewise-linear trace for zeros at distance >= margin from x = +-L.
///
/// zero_tol <= 0 selects 1e-10 * max |trace|.
NodalScan trace_nodal_points(const Field& f, double margin, double zero_tol = 0.0);

struct RadiusWindow {
    double r_min = 0.0;
    double r_max = 0.0;
};

/// [8h, 0.5 dist(x0, outer boundary)] with h the x-spacing.
RadiusWindow default_window(const Field& f, double x0);

struct BlowupDiagnostics {
    double x0 = 0.0;
    std::vector<double> radii;
    std::vector<double> H;
    std::vector<double> N_q;
    std::vector<std::pair<double, double>> dyadic_slopes;   ///< (r, 0.5 log2(H(2r)/H(r)))
    double slope_order = 0.0;      ///< primary: least squares of 0.5 log H against log r
    double slope_stderr = 0.0;
    double plateau_order = 0.0;    ///< secondary: median N_q on the lower half of the window
    double gap = 0.0;              ///< |primary - secondary|
    std::string estimator = "H-slope";
};

struct VanishingOrder {
    double order = 0.0;
    BlowupDiagnostics diagnostics;
};

struct OrderOptions {
    std::optional<RadiusWindow> window;
    int n_radii = 24;
    int n_theta = 256;
    double h_floor = 1e-24;
    double zero_tol = 1e-8;   ///< relative to max(1, max |trace|)
};

/// Throws DegenerateDenominator (unique-continuation alarm) when H hits the floor.
VanishingOrder vanishing_order(const Field& f, double x0, const Parameters& p,
                               const OrderOptions& opts = {});

struct ClassifyOptions {
    double tol = 0.1;
    OrderOptions order{};
};

NodalPoint classify(const Field& f, double x0, const Parameters& p, const DerivedExponents& d,
                    const ClassifyOptions& opts = {}, BlowupDiagnostics* diagnostics = nullptr);

struct TangentMap {
    int k = 0;
    double coefficient = 0.0;
    std::vector<double> radii;
    std::vector<double> monneau;
    double monneau_slope = 0.0;   ///< log-log slope; NaN when the curve vanishes identically
};

/// Fits c p_k(. - x0) on the smallest window radius and tabulates the Monneau curve.
TangentMap tangent_map(const Field& f, double x0, int k, const Parameters& p,
                       const OrderOptions& opts = {});

enum class Normalization { H, H1a, power };

const char* to_string(Normalization n);

struct BlowupSequence {
    Normalization normalization = Normalization::H;
    double k = 0.0;
    std::vector<double> radii;
    std::vector<double> xi;                   ///< abscissae on [-1, 1]
    std::vector<std::vector<double>> traces;  ///< one rescaled trace per radius
    std::vector<double> norms;                ///< the divisor used per radius
    std::vector<std::vector<double>> sup_distance;
};

/// Rescaled traces u(x0 + r xi, 0) / rho(r); k is used only by the power normalization.
BlowupSequence blowup_sequence(const Field& f, double x0, const std::vector<double>& radii,
                               Normalization normalization, double k, int n_samples = 101,
                               int n_theta = 256);

/// Same for an analytic homogeneous field centred at the origin; the
/// normalizations are evaluated by quadrature of the angular profile.
BlowupSequence blowup_sequence(const HomogeneousField& u, const std::vector<double>& radii,
                               Normalization normalization, double k, int n_samples = 101,
                               int n_theta = 4096);

/// H1a for points of order k_q, power-k below it.
Normalization default_normalization(double order, double k_q, double tol = 0.1);

/// Every nodal point of a field, classified.
struct NodalReport {
    Parameters params;
    DerivedExponents exponents;
    std::vector<NodalPoint> points;
    std::vector<BlowupDiagnostics> diagnostics;
    std::vector<std::pair<double, double>> zero_intervals;
    std::vector<std::string> alarms;
};

NodalReport analyze_nodal_set(const Field& f, const Parameters& p, const ClassifyOptions& opts = {},
                              double margin = -1.0);

}  // namespace nodalset
