#include "nodalset/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nodalset/errors.hpp"

namespace nodalset {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGLx = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                        0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLw = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};

void require_n1(const Parameters& p) {
    if (p.n != 1) throw InvalidArgument("functionals are evaluated on n = 1 fields only");
}

}  // namespace

void check_radius(const Field& f, double x0, double r) {
    const Mesh& m = f.mesh();
    if (!(r > 0.0)) throw InvalidArgument("radius must be positive");
    const double hx = m.x[1] - m.x[0];
    const double hy_top = m.y[m.My] - m.y[m.My - 1];
    if (x0 - r < m.x.front() + hx || x0 + r > m.x.back() - hx || r > m.y.back() - hy_top) {
        std::ostringstream msg;
        msg << "radius " << r << " about x0=" << x0 << " exceeds the interior margin of the mesh";
        throw InvalidArgument(msg.str());
    }
}

SphereSamples sphere_samples(const Field& f, double x0, double r, int n_theta) {
    check_radius(f, x0, r);
    if (n_theta < 2) throw InvalidArgument("n_theta must be >= 2");
    const double a = f.mesh().a;
    SphereSamples s;
    s.x0 = x0;
    s.r = r;
    s.theta.resize(n_theta);
    s.weight.assign(n_theta, std::numbers::pi / n_theta);
    s.sin_a.resize(n_theta);
    s.u.resize(n_theta);
    s.du_dr.resize(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        const double th = (i + 0.5) * std::numbers::pi / n_theta;
        const double c = std::cos(th);
        const double sn = std::sin(th);
        const double x = x0 + r * c;
        const double y = r * sn;
        s.theta[i] = th;
        s.sin_a[i] = std::pow(sn, a);
        s.u[i] = f(x, y);
        const auto g = f.gradient(x, y);
        s.du_dr[i] = g[0] * c + g[1] * sn;
    }
    return s;
}

namespace {

// r^{-(n+a)} int y^a v^2 dsigma = r^{1-n} sum w sin^a v^2 on the half circle.
double sphere_mass(const SphereSamples& s, const std::vector<double>& v, int n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += s.weight[i] * s.sin_a[i] * v[i] * v[i];
    return std::pow(s.r, 1 - n) * acc;
}

double H_from(const SphereSamples& s, int n) { return sphere_mass(s, s.u, n); }

}  // namespace

double H_val(const Field& f, double x0, double r, int n_theta) {
    require_n1(f.params());
    return H_from(sphere_samples(f, x0, r, n_theta), f.params().n);
}

namespace {

// y^a-weighted fraction of cell (i, j) inside the disk about (x0, 0).
double covered_fraction(const Mesh& m, int i, int j, double x0, double r) {
    const double xa = m.x[i], xb = m.x[i + 1];
    const double ya = m.y[j], yb = m.y[j + 1];
    auto inside = [&](double x, double y) { return (x - x0) * (x - x0) + y * y <= r * r; };
    if (inside(xa, ya) && inside(xb, ya) && inside(xa, yb) && inside(xb, yb)) return 1.0;
    const double nx = std::clamp(x0, xa, xb);
    const double ny = std::clamp(0.0, ya, yb);
    if ((nx - x0) * (nx - x0) + ny * ny >= r * r) return 0.0;

    const double a = m.a;
    auto column = [&](double x) {
        const double dx = x - x0;
        const double h2 = r * r - dx * dx;
        if (h2 <= ya * ya) return 0.0;
        const double h = std::min(std::sqrt(h2), yb);
        return weight_integral(ya, h, a);
    };
    std::vector<double> cuts = {xa, xb};
    for (double level : {ya, yb}) {
        if (level < r) {
            const double w = std::sqrt(r * r - level * level);
            for (double c : {x0 - w, x0 + w}) {
                if (c > xa && c < xb) cuts.push_back(c);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k], hi = cuts[k + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t g = 0; g < kGLx.size(); ++g) acc += half * kGLw[g] * column(mid + half * kGLx[g]);
    }
    return std::clamp(acc / ((xb - xa) * m.ya_cell[j]), 0.0, 1.0);
}

// Cell energy matching the discrete operator's quadratic form.
double cell_energy(const Field& f, int i, int j) {
    const Mesh& m = f.mesh();
    const double hx = m.x[i + 1] - m.x[i];
    const double d_left = f.value(i, j + 1) - f.value(i, j);
    const double d_right = f.value(i + 1, j + 1) - f.value(i + 1, j);
    const double d_bottom = f.value(i + 1, j) - f.value(i, j);
    const double d_top = f.value(i + 1, j + 1) - f.value(i, j + 1);
    const double vertical = 0.5 * hx * (d_left * d_left + d_right * d_right) / m.yma_cell[j];
    const double horizontal = (d_bottom * d_bottom * m.ya_lower[j] + d_top * d_top * m.ya_upper[j]) / hx;
    return vertical + horizontal;
}

}  // namespace

double bulk_energy(const Field& f, double x0, double r) {
    check_radius(f, x0, r);
    const Mesh& m = f.mesh();
    const int i0 = m.locate_x(x0 - r);
    const int i1 = m.locate_x(x0 + r);
    const int j1 = m.locate_y(r);
    double acc = 0.0;
    for (int j = 0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const double frac = covered_fraction(m, i, j, x0, r);
            if (frac > 0.0) acc += frac * cell_energy(f, i, j);
        }
    }
    return acc;
}

namespace {

// int_0^len |u|^q for u linear from ua to ub without sign change.
double power_segment(double ua, double ub, double len, double q) {
    const double A = std::abs(ua), B = std::abs(ub);
    if (std::abs(B - A) <= 1e-14 * std::max(A, B)) return len * std::pow(0.5 * (A + B), q);
    return len * (std::pow(B, q + 1.0) - std::pow(A, q + 1.0)) / ((q + 1.0) * (B - A));
}

double F_segment(double ua, double ub, double len, const Parameters& p) {
    if (len <= 0.0) return 0.0;
    auto piece = [&](double u0, double u1, double l) {
        const double mid = 0.5 * (u0 + u1);
        const double lam = mid > 0.0 ? p.lambda_plus : (mid < 0.0 ? p.lambda_minus : 0.0);
        return lam * power_segment(u0, u1, l, p.q);
    };
    if ((ua > 0.0 && ub < 0.0) || (ua < 0.0 && ub > 0.0)) {
        const double t = ua / (ua - ub);
        return piece(ua, 0.0, t * len) + piece(0.0, ub, (1.0 - t) * len);
    }
    return piece(ua, ub, len);
}

}  // namespace

double trace_F_integral(const Field& f, double x0, double r, const Parameters& p) {
    const Mesh& m = f.mesh();
    const double lo = x0 - r, hi = x0 + r;
    if (lo < m.x.front() || hi > m.x.back()) throw InvalidArgument("trace segment leaves the mesh");
    double acc = 0.0;
    for (int i = m.locate_x(lo); i < m.Nx && m.x[i] < hi; ++i) {
        const double xa = std::max(m.x[i], lo);
        const double xb = std::min(m.x[i + 1], hi);
        if (xb <= xa) continue;
        acc += F_segment(f.trace(xa), f.trace(xb), xb - xa, p);
    }
    return acc;
}

double E_t_val(const Field& f, double x0, double r, double t, const Parameters& p) {
    require_n1(p);
    const double a = f.mesh().a;
    const double scale = std::pow(r, -(p.n + a - 1.0));
    return scale * (bulk_energy(f, x0, r) - (t / p.q) * trace_F_integral(f, x0, r, p));
}

double N_t_val(const Field& f, double x0, double r, double t, const Parameters& p,
               const QuadratureOptions& opts) {
    const double H = H_val(f, x0, r, opts.n_theta);
    if (!(H > opts.h_floor)) {
        std::ostringstream msg;
        msg << "H(" << x0 << ", r=" << r << ") = " << H << " is below the floor " << opts.h_floor;
        throw DegenerateDenominator(msg.str());
    }
    return E_t_val(f, x0, r, t, p) / H;
}

double W_val(const Field& f, double x0, double r, double k, double t, const Parameters& p, int n_theta) {
    const double H = H_val(f, x0, r, n_theta);
    return (E_t_val(f, x0, r, t, p) - k * H) / std::pow(r, 2.0 * k);
}

double monneau_val(const Field& f, double x0, const std::function<double(double, double)>& poly,
                   double r, double k, int n_theta) {
    require_n1(f.params());
    const SphereSamples s = sphere_samples(f, x0, r, n_theta);
    std::vector<double> diff(s.u.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = s.u[i] - poly(r * std::cos(s.theta[i]), r * std::sin(s.theta[i]));
    }
    return sphere_mass(s, diff, f.params().n) / std::pow(r, 2.0 * k);
}

const std::vector<double>& FunctionalCurve::weiss_column(double k, double t) const {
    for (const auto& [kt, col] : W) {
        if (std::abs(kt.first - k) < 1e-12 && std::abs(kt.second - t) < 1e-12) return col;
    }
    std::ostringstream msg;
    msg << "curve has no W column for (k=" << k << ", t=" << t << ")";
    throw InvalidArgument(msg.str());
}

FunctionalCurve curve(const Field& f, double x0, const std::vector<double>& radii,
                      const CurveRequest& request, const Parameters& p) {
    require_n1(p);
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) throw InvalidArgument("radii must be strictly increasing");
    }
    const double a = f.mesh().a;
    const std::size_t n = radii.size();
    FunctionalCurve c;
    c.x0 = x0;
    c.r = radii;
    c.H.assign(n, kNaN);
    c.E_q.assign(n, kNaN);
    c.E_2.assign(n, kNaN);
    c.N_q.assign(n, kNaN);
    c.N_2.assign(n, kNaN);
    c.trace_F.assign(n, kNaN);
    for (double t : request.extra_t) c.E_t.push_back({t, std::vector<double>(n, kNaN)});
    for (const auto& kt : request.weiss) c.W.push_back({kt, std::vector<double>(n, kNaN)});
    if (request.monneau_poly) c.monneau.assign(n, kNaN);
    c.dHdr.assign(n, kNaN);
    c.defect.assign(n, kNaN);
    c.flagged.assign(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        const double r = radii[i];
        try {
            const SphereSamples s = sphere_samples(f, x0, r, request.n_theta);
            const double H = H_from(s, p.n);
            const double D = bulk_energy(f, x0, r);
            const double Fi = trace_F_integral(f, x0, r, p);
            const double scale = std::pow(r, -(p.n + a - 1.0));
            auto E_of = [&](double t) { return scale * (D - (t / p.q) * Fi); };
            c.H[i] = H;
            c.trace_F[i] = Fi;
            c.E_q[i] = E_of(p.q);
            c.E_2[i] = E_of(2.0);
            if (H > request.h_floor) {
                c.N_q[i] = c.E_q[i] / H;
                c.N_2[i] = c.E_2[i] / H;
            } else {
                std::ostringstream msg;
                msg << "r=" << r << ": H below floor, frequency undefined";
                c.notes.push_back(msg.str());
            }
            for (auto& [t, col] : c.E_t) col[i] = E_of(t);
            for (auto& [kt, col] : c.W) col[i] = (E_of(kt.second) - kt.first * H) / std::pow(r, 2.0 * kt.first);
            if (request.monneau_poly) {
                std::vector<double> diff(s.u.size());
                for (std::size_t q = 0; q < diff.size(); ++q) {
                    diff[q] = s.u[q] - request.monneau_poly(r * std::cos(s.theta[q]), r * std::sin(s.theta[q]));
                }
                c.monneau[i] = sphere_mass(s, diff, p.n) / std::pow(r, 2.0 * request.monneau_k);
            }
        } catch (const InvalidArgument& e) {
            c.flagged[i] = true;
            c.notes.push_back(e.what());
        }
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (c.flagged[i - 1] || c.flagged[i] || c.flagged[i + 1]) continue;
        const double h1 = radii[i] - radii[i - 1];
        const double h2 = radii[i + 1] - radii[i];
        const double d = -h2 / (h1 * (h1 + h2)) * c.H[i - 1] + (h2 - h1) / (h1 * h2) * c.H[i] +
                         h1 / (h2 * (h1 + h2)) * c.H[i + 1];
        c.dHdr[i] = d;
        c.defect[i] = std::abs(d - 2.0 * c.E_q[i] / radii[i]);
    }
    return c;
}

MonotonicityReport check_monotonicity(const FunctionalCurve& c, MonotonicityKind kind,
                                      const MonotonicityParams& params, double tolerance) {
    if (c.size() < 3) throw InvalidArgument("monotonicity check needs at least 3 radii");
    MonotonicityReport rep;
    rep.monitored.resize(c.size());
    if (kind == MonotonicityKind::weiss_k2) {
        rep.monitored = c.weiss_column(params.k, 2.0);
    } else {
        for (std::size_t i = 0; i < c.size(); ++i) {
            rep.monitored[i] = std::exp(params.C_tilde * std::pow(c.r[i], params.alpha)) * (c.N_q[i] + 1.0);
        }
    }
    bool violated = false;
    std::size_t prev = c.size();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double v = rep.monitored[i];
        if (!std::isfinite(v)) continue;
        rep.scale = std::max(rep.scale, std::abs(v));
        if (prev < c.size()) {
            const double drop = rep.monitored[prev] - v;
            rep.max_decrease = std::max(rep.max_decrease, drop);
            if (drop > tolerance) violated = true;
        }
        if (!violated) rep.monotone_up_to = c.r[i];
        prev = i;
    }
    rep.pass = rep.max_decrease <= tolerance;
    return rep;
}

MonotonicityParams almgren_constants(const FunctionalCurve& c, const Parameters& p, double observed_order) {
    const DerivedExponents d = derive_exponents(p);
    const double delta = d.k_q - observed_order;
    if (!(delta > 0.0)) throw InvalidArgument("perturbed Almgren constants need an order below k_q");
    MonotonicityParams mp;
    mp.alpha = 0.5 * delta;
    const double Cnq = critical_constant(p.n, p.q, p.s);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.flagged[i] || !std::isfinite(c.H[i])) continue;
        const double denom = c.E_q[i] + c.H[i];
        if (!(denom > 0.0)) throw NumericalError("E + H must be positive for the perturbed Almgren bound");
        const double r = c.r[i];
        const double g = (Cnq / p.q) * std::pow(r, -(p.n + d.a)) * c.trace_F[i] / denom;
        mp.C_tilde = std::max(mp.C_tilde, g * std::pow(r, 1.0 - mp.alpha) / mp.alpha);
    }
    return mp;
}

}  // namespace nodalset
