#include "nodalset/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "nodalset/errors.hpp"

namespace nodalset {

namespace {

constexpr double kPi = std::numbers::pi;

using State = std::array<double, 2>;

struct FluxSystem {
    double a;
    double mu;
    void operator()(const State& x, State& dxdt, double theta) const {
        const double sn = std::sin(theta);
        const double sa = std::pow(sn, a);
        dxdt[0] = x[1] / sa;
        dxdt[1] = -mu * sa * x[0];
    }
};

// Local expansion about an endpoint in the outward distance t.
// Returns the 2x2 linear map (phi_e, w_e) -> (phi(t), w(t)).
std::array<double, 4> series_matrix(double a, double mu, double t) {
    if (t == 0.0) return {1.0, 0.0, 0.0, 1.0};
    const double t1ma = std::pow(t, 1.0 - a);
    const double t1pa = std::pow(t, 1.0 + a);
    const double t3ma = t1ma * t * t;
    const double t3pa = t1pa * t * t;
    const double m11 = 1.0 - mu * t * t / (2.0 * (1.0 + a));
    const double m12 = t1ma / (1.0 - a) + a * t3ma / (6.0 * (3.0 - a)) -
                       mu * t3ma / (2.0 * (1.0 - a) * (3.0 - a));
    const double m21 = -mu * t1pa / (1.0 + a) + mu * a * t3pa / (6.0 * (3.0 + a)) +
                       mu * mu * t3pa / (2.0 * (1.0 + a) * (3.0 + a));
    const double m22 = 1.0 - mu * t * t / (2.0 * (1.0 - a));
    return {m11, m12, m21, m22};
}

// Series in the outward variable; at theta = pi the outward flux is -w.
FluxState series_forward(double a, double mu, FluxState endpoint, double t) {
    const auto m = series_matrix(a, mu, t);
    return {m[0] * endpoint.phi + m[1] * endpoint.w, m[2] * endpoint.phi + m[3] * endpoint.w};
}

FluxState series_inverse(double a, double mu, FluxState at_t, double t) {
    const auto m = series_matrix(a, mu, t);
    const double det = m[0] * m[3] - m[1] * m[2];
    return {(m[3] * at_t.phi - m[1] * at_t.w) / det, (-m[2] * at_t.phi + m[0] * at_t.w) / det};
}

FluxState to_outward_pi(FluxState s) { return {s.phi, -s.w}; }

// Adaptive Dormand-Prince integration inside the regular zone.
FluxState rk_integrate(double a, double mu, double theta0, double theta1, FluxState init,
                       const IntegratorOptions& opts) {
    if (theta0 == theta1) return init;
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(opts.tol, opts.tol);
    FluxSystem sys{a, mu};
    State x{init.phi, init.w};
    double t = theta0;
    const double dir = theta1 > theta0 ? 1.0 : -1.0;
    double dt = dir * std::min(1e-3, std::abs(theta1 - theta0));
    int guard = 0;
    while (dir * (theta1 - t) > 0.0) {
        if (dir * (t + dt - theta1) > 0.0) dt = theta1 - t;
        const auto res = stepper.try_step(sys, x, t, dt);
        if (res == odeint::fail) {
            if (std::abs(dt) < opts.min_step) {
                std::ostringstream msg;
                msg << "step-size underflow at theta=" << t << " (a=" << a << ", mu=" << mu << ")";
                throw NumericalError(msg.str());
            }
        } else if (std::abs(theta1 - t) <= 1e-15 * std::max(1.0, std::abs(theta1))) {
            t = theta1;
        }
        if (++guard > 10'000'000) throw NumericalError("flux integrator made no progress");
    }
    return {x[0], x[1]};
}

}  // namespace

FluxState propagate_flux(double a, double mu, double theta0, double theta1, FluxState init,
                         const IntegratorOptions& opts) {
    if (!(a > -1.0 && a < 1.0)) throw InvalidArgument("weight exponent must lie in (-1,1)");
    if (theta0 < 0.0 || theta0 > kPi || theta1 < 0.0 || theta1 > kPi) {
        throw InvalidArgument("integration interval must lie in [0, pi]");
    }
    const double h0 = opts.h0;
    if (theta0 == theta1) return init;

    auto zone_of = [&](double th) { return th < h0 ? -1 : (th > kPi - h0 ? 1 : 0); };
    const int z0 = zone_of(theta0);
    const int z1 = zone_of(theta1);

    // Both ends in the same endpoint zone: series only.
    if (z0 == -1 && z1 == -1) {
        const FluxState e = series_inverse(a, mu, init, theta0);
        return series_forward(a, mu, e, theta1);
    }
    if (z0 == 1 && z1 == 1) {
        const FluxState e = series_inverse(a, mu, to_outward_pi(init), kPi - theta0);
        return to_outward_pi(series_forward(a, mu, e, kPi - theta1));
    }

    FluxState s = init;
    double th = theta0;
    if (z0 == -1) {
        const FluxState e = series_inverse(a, mu, init, theta0);
        s = series_forward(a, mu, e, h0);
        th = h0;
    } else if (z0 == 1) {
        const FluxState e = series_inverse(a, mu, to_outward_pi(init), kPi - theta0);
        s = to_outward_pi(series_forward(a, mu, e, h0));
        th = kPi - h0;
    }

    const double target = z1 == -1 ? h0 : (z1 == 1 ? kPi - h0 : theta1);
    s = rk_integrate(a, mu, th, target, s, opts);

    if (z1 == -1) {
        const FluxState e = series_inverse(a, mu, s, h0);
        return series_forward(a, mu, e, theta1);
    }
    if (z1 == 1) {
        const FluxState e = series_inverse(a, mu, to_outward_pi(s), h0);
        return to_outward_pi(series_forward(a, mu, e, kPi - theta1));
    }
    return s;
}

AngularProfile::AngularProfile(double a, double mu, IntegratorOptions opts, Symmetry symmetry,
                               std::vector<double> theta, std::vector<double> phi,
                               std::vector<double> w)
    : a_(a), mu_(mu), opts_(opts), symmetry_(symmetry), theta_(std::move(theta)),
      phi_(std::move(phi)), w_(std::move(w)) {
    if (theta_.size() < 2 || phi_.size() != theta_.size() || w_.size() != theta_.size()) {
        throw InvalidArgument("angular profile needs matching sample arrays with >= 2 nodes");
    }
}

FluxState AngularProfile::state_at(double theta) const {
    if (theta < theta_.front() - 1e-14 || theta > theta_.back() + 1e-14) {
        throw InvalidArgument("theta outside the profile interval");
    }
    theta = std::clamp(theta, theta_.front(), theta_.back());
    // Mirror through pi/2 so evaluations inherit the exact symmetry of the samples.
    if (symmetry_ != Symmetry::none && theta > kPi / 2 && theta_.front() == 0.0 &&
        theta_.back() == kPi) {
        const FluxState m = state_at(kPi - theta);
        return symmetry_ == Symmetry::symmetric ? FluxState{m.phi, -m.w} : FluxState{-m.phi, m.w};
    }
    const auto it = std::lower_bound(theta_.begin(), theta_.end(), theta);
    std::size_t idx = static_cast<std::size_t>(it - theta_.begin());
    if (idx == theta_.size()) idx = theta_.size() - 1;
    if (idx > 0 && (theta - theta_[idx - 1]) < (theta_[idx] - theta)) --idx;
    if (theta_[idx] == theta) return {phi_[idx], w_[idx]};
    return propagate_flux(a_, mu_, theta_[idx], theta, {phi_[idx], w_[idx]}, opts_);
}

AngularProfile integrate_flux_system(double a, double mu, double theta0, double theta1,
                                     FluxState init, const IntegratorOptions& opts) {
    if (theta1 <= theta0) throw InvalidArgument("integrate_flux_system needs theta0 < theta1");
    const int panels = std::max(2, static_cast<int>(std::ceil(opts.samples * (theta1 - theta0) / kPi)));
    std::vector<double> th(panels + 1), ph(panels + 1), w(panels + 1);
    FluxState s = init;
    th[0] = theta0;
    ph[0] = s.phi;
    w[0] = s.w;
    for (int i = 1; i <= panels; ++i) {
        const double next = i == panels ? theta1 : theta0 + (theta1 - theta0) * i / panels;
        s = propagate_flux(a, mu, th[i - 1], next, s, opts);
        th[i] = next;
        ph[i] = s.phi;
        w[i] = s.w;
    }
    return AngularProfile(a, mu, opts, Symmetry::none, std::move(th), std::move(ph), std::move(w));
}

double characteristic_exponent(double eigenvalue, double a) {
    return 0.5 * (-a + std::sqrt(a * a + 4.0 * eigenvalue));
}

namespace {

// Smallest mu where shoot(mu) changes sign, scanned geometrically then bisected.
template <class Shoot>
double first_sign_change(Shoot shoot, double tol, const char* what) {
    constexpr double kMuMax = 50.0;
    double lo = 0.0;
    double f_lo = shoot(lo);
    if (!(f_lo > 0.0)) throw NumericalError(std::string(what) + ": shooting map not positive at mu=0");
    double hi = 1e-2;
    double f_hi = shoot(hi);
    while (f_hi > 0.0) {
        lo = hi;
        f_lo = f_hi;
        hi *= 1.25;
        if (hi > kMuMax) {
            std::ostringstream msg;
            msg << what << ": no sign change of the shooting map on mu in (0, " << kMuMax << "]";
            throw NumericalError(msg.str());
        }
        f_hi = shoot(hi);
    }
    for (int it = 0; it < 200 && (hi - lo) > tol * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = shoot(mid);
        if (f_mid > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

EigenResult eigen_mixed(double T, double a, double tol, const IntegratorOptions& opts) {
    if (!(T > 0.0 && T < kPi)) throw InvalidArgument("eigen_mixed requires T in (0, pi)");
    auto shoot = [&](double mu) { return propagate_flux(a, mu, 0.0, T, {1.0, 0.0}, opts).phi; };
    EigenResult r;
    r.eigenvalue = first_sign_change(shoot, tol, "eigen_mixed");
    r.k1 = characteristic_exponent(r.eigenvalue, a);
    r.T = T;
    r.a = a;
    r.kind = EigenProblem::mixed;
    r.eigenfunction = integrate_flux_system(a, r.eigenvalue, 0.0, T, {1.0, 0.0}, opts);
    return r;
}

EigenResult eigen_dirichlet(double T, double a, double tol, const IntegratorOptions& opts) {
    if (!(T > 0.0 && T < kPi / 2)) throw InvalidArgument("eigen_dirichlet requires T in (0, pi/2)");
    // The first eigenfunction is even about pi/2, so w(pi/2) = 0 is the target.
    auto shoot = [&](double mu) { return propagate_flux(a, mu, T, kPi / 2, {0.0, 1.0}, opts).w; };
    EigenResult r;
    r.eigenvalue = first_sign_change(shoot, tol, "eigen_dirichlet");
    r.k1 = characteristic_exponent(r.eigenvalue, a);
    r.T = T;
    r.a = a;
    r.kind = EigenProblem::dirichlet;
    r.eigenfunction = integrate_flux_system(a, r.eigenvalue, T, kPi - T, {0.0, 1.0}, opts);
    return r;
}

double find_Tstar(double a, double k_q, double tol, const IntegratorOptions& opts) {
    const double two_s = 1.0 - a;
    if (!(k_q > two_s && k_q < 2.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "k_q=" << k_q << " outside the attainable exponent window (" << two_s << ", 2]";
        throw OutOfRegime(msg.str());
    }
    auto gap = [&](double T) { return eigen_dirichlet(T, a, 1e-14, opts).k1 - k_q; };
    double lo = 1e-9;
    // k1 = 2 at arctan(sqrt(1 + a)), so a small step beyond it brackets every k_q <= 2.
    double hi = std::atan(std::sqrt(1.0 + a)) + 0.1;
    if (!(gap(lo) < 0.0) || !(gap(hi) > 0.0)) {
        std::ostringstream msg;
        msg << "find_Tstar: k_q=" << k_q << " not bracketed on T in [" << lo << ", " << hi << "]";
        throw OutOfRegime(msg.str());
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = gap(mid);
        if (std::abs(g) <= tol || (hi - lo) < 1e-15) return mid;
        if (g < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double nonlinear_amplitude(double a, double q, double lambda_plus, double w0_normalized) {
    (void)a;
    if (!(w0_normalized < 0.0)) {
        throw OutOfRegime("normalized weighted flux at 0 must be negative (mu below the mixed eigenvalue)");
    }
    if (!(q >= 1.0 && q < 2.0)) throw InvalidArgument("q must lie in [1,2)");
    if (!(lambda_plus > 0.0)) throw InvalidArgument("lambda_plus must be positive");
    return std::pow(lambda_plus / (-w0_normalized), 1.0 / (2.0 - q));
}

namespace {

// Normalized psi with psi(0) = 1 and psi(T) = 0, by superposing the two
// fundamental solutions started at theta = 0.
double shoot_normalized_flux(double a, double mu, double T, const IntegratorOptions& opts) {
    const FluxState g1 = propagate_flux(a, mu, 0.0, T, {1.0, 0.0}, opts);
    const FluxState g2 = propagate_flux(a, mu, 0.0, T, {0.0, 1.0}, opts);
    if (g2.phi == 0.0) throw NumericalError("degenerate linear shooting (g2(T) = 0)");
    return -g1.phi / g2.phi;
}

void check_constructive_regime(const Parameters& p, const DerivedExponents& d) {
    if (p.n != 1) throw OutOfRegime("profiles are constructed for n = 1 only");
    if (p.lambda_plus != p.lambda_minus) {
        throw OutOfRegime("constructive regime requires lambda_plus == lambda_minus");
    }
    if (!(p.lambda_plus > 0.0)) throw OutOfRegime("constructive regime requires lambda_plus > 0");
    if (!(d.k_q < 1.0)) {
        std::ostringstream msg;
        msg << "out of constructive regime: k_q=" << d.k_q << " >= 1";
        throw OutOfRegime(msg.str());
    }
}

std::vector<double> uniform_grid(double t0, double t1, int panels) {
    std::vector<double> g(panels + 1);
    for (int i = 0; i <= panels; ++i) g[i] = t0 + (t1 - t0) * i / panels;
    g.back() = t1;
    return g;
}

}  // namespace

AngularProfile build_antisymmetric(const Parameters& p, const DerivedExponents& d,
                                   const IntegratorOptions& opts) {
    check_constructive_regime(p, d);
    const double a = d.a;
    const double mu = d.mu;
    const double w0n = shoot_normalized_flux(a, mu, kPi / 2, opts);
    const double c = nonlinear_amplitude(a, p.q, p.lambda_plus, w0n);

    const int half = std::max(2, opts.samples / 2);
    const auto grid = uniform_grid(0.0, kPi / 2, half);
    std::vector<double> th(2 * half + 1), ph(2 * half + 1), w(2 * half + 1);
    FluxState s{c, c * w0n};
    for (int i = 0; i <= half; ++i) {
        if (i > 0) s = propagate_flux(a, mu, grid[i - 1], grid[i], s, opts);
        th[i] = grid[i];
        ph[i] = s.phi;
        w[i] = s.w;
    }
    ph[half] = 0.0;
    for (int i = 1; i <= half; ++i) {
        th[half + i] = kPi - grid[half - i];
        ph[half + i] = -ph[half - i];
        w[half + i] = w[half - i];
    }
    th.back() = kPi;
    AngularProfile prof(a, mu, opts, Symmetry::antisymmetric, std::move(th), std::move(ph), std::move(w));
    prof.amplitude = c;
    // Continuity of the odd extension needs phi(pi/2) = 0 from the shooting.
    const FluxState mid = propagate_flux(a, mu, 0.0, kPi / 2, {c, c * w0n}, opts);
    prof.glue_jump = std::abs(mid.phi);
    return prof;
}

AngularProfile build_symmetric(const Parameters& p, const DerivedExponents& d,
                               const IntegratorOptions& opts) {
    check_constructive_regime(p, d);
    const double a = d.a;
    const double mu = d.mu;
    const double Tstar = find_Tstar(a, d.k_q, 1e-12, opts);

    const double w0n = shoot_normalized_flux(a, mu, Tstar, opts);
    const double c = nonlinear_amplitude(a, p.q, p.lambda_plus, w0n);
    const FluxState psi_T = propagate_flux(a, mu, 0.0, Tstar, {c, c * w0n}, opts);
    // Middle piece: Dirichlet eigenfunction (0, 1) at T*, scaled by -C to match flux.
    const double C = -psi_T.w;
    if (!(C > 0.0)) throw NumericalError("symmetric build: flux at T* has the wrong sign");

    const int left_panels = std::max(2, static_cast<int>(std::ceil(opts.samples * Tstar / kPi)));
    const int mid_panels = std::max(2, static_cast<int>(std::ceil(opts.samples * (kPi / 2 - Tstar) / kPi)));
    const auto g_left = uniform_grid(0.0, Tstar, left_panels);
    const auto g_mid = uniform_grid(Tstar, kPi / 2, mid_panels);

    std::vector<double> th, ph, w;
    FluxState s{c, c * w0n};
    for (int i = 0; i <= left_panels; ++i) {
        if (i > 0) s = propagate_flux(a, mu, g_left[i - 1], g_left[i], s, opts);
        th.push_back(g_left[i]);
        ph.push_back(s.phi);
        w.push_back(s.w);
    }
    ph.back() = 0.0;
    const double left_flux_T = w.back();
    FluxState m{0.0, 1.0};
    for (int i = 1; i <= mid_panels; ++i) {
        m = propagate_flux(a, mu, g_mid[i - 1], g_mid[i], m, opts);
        th.push_back(g_mid[i]);
        ph.push_back(-C * m.phi);
        w.push_back(-C * m.w);
    }
    w.back() = 0.0;
    // w at T* is taken from the middle piece; the two sides agree by the choice of C.
    w[left_panels] = -C * 1.0;
    const std::size_t half = th.size() - 1;
    for (std::size_t i = 1; i <= half; ++i) {
        th.push_back(kPi - th[half - i]);
        ph.push_back(ph[half - i]);
        w.push_back(-w[half - i]);
    }
    th.back() = kPi;

    AngularProfile prof(a, mu, opts, Symmetry::symmetric, std::move(th), std::move(ph), std::move(w));
    prof.amplitude = c;
    prof.glue_points = {Tstar, kPi - Tstar};

    // Independent glue check: run the middle piece across the whole interval
    // and compare with the mirrored left piece at pi - T*.
    const FluxState across = propagate_flux(a, mu, Tstar, kPi - Tstar, {0.0, 1.0}, opts);
    const double jump_left = std::abs(left_flux_T - (-C));
    const double jump_right = std::abs(-C * across.w - (-left_flux_T));
    const double phi_right = std::abs(C * across.phi);
    prof.glue_jump = std::max({jump_left, jump_right, phi_right});
    return prof;
}

double ode_residual(const AngularProfile& profile, double exclusion) {
    const auto& th = profile.theta();
    const auto& ph = profile.phi();
    const auto& w = profile.w();
    const double a = profile.a();
    const double mu = profile.mu();
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < th.size(); ++i) {
        const double t = th[i];
        if (t - th.front() < exclusion || th.back() - t < exclusion) continue;
        bool near_glue = false;
        for (double g : profile.glue_points) {
            if (std::abs(t - g) < exclusion) near_glue = true;
        }
        if (near_glue) continue;
        const double h1 = th[i + 1] - th[i];
        const double h2 = th[i] - th[i - 1];
        if (std::abs(h1 - h2) > 1e-9 * h1 || std::abs((th[i + 2] - th[i + 1]) - h1) > 1e-9 * h1 ||
            std::abs((th[i - 1] - th[i - 2]) - h1) > 1e-9 * h1) {
            continue;  // stencil spans a grid seam
        }
        const double dw = (-w[i + 2] + 8.0 * w[i + 1] - 8.0 * w[i - 1] + w[i - 2]) / (12.0 * h1);
        worst = std::max(worst, std::abs(dw + mu * std::pow(std::sin(t), a) * ph[i]));
    }
    return worst;
}

}  // namespace nodalset
