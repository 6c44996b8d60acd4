#include "nodalset/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <functional>
#include <sstream>

#include "nodalset/errors.hpp"
#include "nodalset/homogeneous.hpp"

namespace nodalset {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double max_abs_trace(const Field& f) {
    double m = 0.0;
    for (int i = 0; i <= f.mesh().Nx; ++i) m = std::max(m, std::abs(f.value(i, 0)));
    return m;
}

double median(std::vector<double> v) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Least-squares slope and its standard error.
std::pair<double, double> ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return {kNaN, kNaN};
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxy / sxx;
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - my - b * (x[i] - mx);
        sse += e * e;
    }
    const double se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return {b, se};
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
    return r;
}

double x_spacing(const Field& f) { return f.mesh().x[1] - f.mesh().x[0]; }

}  // namespace

const char* to_string(NodalKind k) {
    switch (k) {
        case NodalKind::crossing: return "crossing";
        case NodalKind::tangential: return "tangential";
        case NodalKind::interval_endpoint: return "interval_endpoint";
    }
    return "?";
}

const char* to_string(Stratum s) {
    switch (s) {
        case Stratum::regular: return "Regular";
        case Stratum::singular: return "Singular";
        case Stratum::sublinear: return "Sublinear";
        case Stratum::unclassified: return "Unclassified";
    }
    return "?";
}

const char* to_string(Normalization n) {
    switch (n) {
        case Normalization::H: return "H";
        case Normalization::H1a: return "H1a";
        case Normalization::power: return "power";
    }
    return "?";
}

NodalScan trace_nodal_points(const Field& f, double margin, double zero_tol) {
    const Mesh& m = f.mesh();
    NodalScan scan;
    scan.zero_tolerance = zero_tol > 0.0 ? zero_tol : 1e-10 * max_abs_trace(f);
    const double tol = scan.zero_tolerance;
    const double lo = m.x.front() + margin, hi = m.x.back() - margin;
    auto admissible = [&](double x) { return x >= lo && x <= hi; };
    auto add = [&](double x, NodalKind kind) {
        if (!admissible(x)) return;
        NodalPoint pt;
        pt.x0 = x;
        pt.kind = kind;
        pt.order = kNaN;
        pt.order_uncertainty = kNaN;
        pt.trace_slope = kNaN;
        pt.tangent_coefficient = kNaN;
        scan.points.push_back(pt);
    };
    const int N = m.Nx;
    std::vector<double> u(N + 1);
    for (int i = 0; i <= N; ++i) u[i] = f.value(i, 0);
    auto zero = [&](int i) { return std::abs(u[i]) <= tol; };

    int i = 0;
    while (i <= N) {
        if (zero(i)) {
            int j = i;
            while (j + 1 <= N && zero(j + 1)) ++j;
            if (j > i) {
                scan.zero_intervals.push_back({m.x[i], m.x[j]});
                add(m.x[i], NodalKind::interval_endpoint);
                add(m.x[j], NodalKind::interval_endpoint);
            } else {
                const double left = i > 0 ? u[i - 1] : 0.0;
                const double right = i < N ? u[i + 1] : 0.0;
                if (left * right < 0.0) {
                    add(m.x[i], NodalKind::crossing);
                } else if (i > 0 && i < N) {
                    add(m.x[i], NodalKind::tangential);
                }
            }
            i = j + 1;
            continue;
        }
        if (i < N && !zero(i + 1) && u[i] * u[i + 1] < 0.0) {
            // Bisection on the interpolated trace; linear in the cell, so this
            // lands on the exact root of the interpolant.
            double a = m.x[i], b = m.x[i + 1];
            double fa = u[i];
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double c = 0.5 * (a + b);
                const double fc = f.trace(c);
                if (fc == 0.0) {
                    a = b = c;
                    break;
                }
                if ((fc < 0.0) == (fa < 0.0)) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            add(0.5 * (a + b), NodalKind::crossing);
        }
        ++i;
    }
    return scan;
}

RadiusWindow default_window(const Field& f, double x0) {
    const Mesh& m = f.mesh();
    const double dist = std::min({x0 - m.x.front(), m.x.back() - x0, m.y.back()});
    RadiusWindow w{8.0 * x_spacing(f), 0.5 * dist};
    if (!(w.r_max > w.r_min)) {
        std::ostringstream msg;
        msg << "no admissible radius window at x0=" << x0 << ": [" << w.r_min << ", " << w.r_max << "]";
        throw InvalidArgument(msg.str());
    }
    return w;
}

VanishingOrder vanishing_order(const Field& f, double x0, const Parameters& p, const OrderOptions& opts) {
    const double scale = std::max(1.0, max_abs_trace(f));
    if (std::abs(f.trace(x0)) > opts.zero_tol * scale) {
        std::ostringstream msg;
        msg << "u(" << x0 << ", 0) = " << f.trace(x0) << " is not a zero of the trace";
        throw InvalidArgument(msg.str());
    }
    const RadiusWindow w = opts.window ? *opts.window : default_window(f, x0);
    if (!(w.r_max > w.r_min) || !(w.r_min > 0.0)) throw InvalidArgument("radius window must satisfy 0 < r_min < r_max");
    if (opts.n_radii < 3) throw InvalidArgument("need at least 3 radii");

    VanishingOrder out;
    BlowupDiagnostics& dg = out.diagnostics;
    dg.x0 = x0;
    dg.radii = log_spaced(w.r_min, w.r_max, opts.n_radii);
    CurveRequest req;
    req.n_theta = opts.n_theta;
    req.h_floor = opts.h_floor;
    const FunctionalCurve c = curve(f, x0, dg.radii, req, p);
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.flagged[i]) throw InvalidArgument(c.notes.empty() ? "inadmissible radius" : c.notes.front());
        if (!(c.H[i] > opts.h_floor)) {
            std::ostringstream msg;
            msg << "unique-continuation alarm: H(" << x0 << ", r=" << c.r[i] << ") = " << c.H[i]
                << " at or below the floor";
            throw DegenerateDenominator(msg.str());
        }
    }
    dg.H = c.H;
    dg.N_q = c.N_q;

    std::vector<double> lr, lh;
    for (std::size_t i = 0; i < c.size(); ++i) {
        lr.push_back(std::log(c.r[i]));
        lh.push_back(0.5 * std::log(c.H[i]));
    }
    std::tie(dg.slope_order, dg.slope_stderr) = ls_slope(lr, lh);

    for (double r : dg.radii) {
        if (2.0 * r > w.r_max * (1.0 + 1e-12)) break;
        const double h1 = H_val(f, x0, r, opts.n_theta);
        const double h2 = H_val(f, x0, 2.0 * r, opts.n_theta);
        dg.dyadic_slopes.push_back({r, 0.5 * std::log2(h2 / h1)});
    }

    std::vector<double> lower;
    for (std::size_t i = 0; i < (c.size() + 1) / 2; ++i) lower.push_back(c.N_q[i]);
    dg.plateau_order = median(lower);
    dg.gap = std::abs(dg.slope_order - dg.plateau_order);
    out.order = dg.slope_order;
    return out;
}

NodalPoint classify(const Field& f, double x0, const Parameters& p, const DerivedExponents& d,
                    const ClassifyOptions& opts, BlowupDiagnostics* diagnostics) {
    const VanishingOrder vo = vanishing_order(f, x0, p, opts.order);
    if (diagnostics) *diagnostics = vo.diagnostics;
    NodalPoint pt;
    pt.x0 = x0;
    pt.kind = NodalKind::crossing;
    pt.order = vo.order;
    pt.order_uncertainty = vo.diagnostics.slope_stderr;
    pt.tangent_coefficient = kNaN;

    const double h = x_spacing(f);
    const double dx = 4.0 * h;
    pt.trace_slope = (f.trace(x0 + dx) - f.trace(x0 - dx)) / (2.0 * dx);
    const double slope_floor = 1e-6 * std::max(1.0, max_abs_trace(f)) / f.mesh().L;

    const double tol = opts.tol;
    struct Candidate {
        Stratum stratum;
        int degree;
        double distance;
    };
    std::vector<Candidate> cands;
    if (std::abs(vo.order - d.k_q) <= tol) cands.push_back({Stratum::sublinear, 0, std::abs(vo.order - d.k_q)});
    for (int m = 1; m <= d.beta_q; ++m) {
        if (std::abs(vo.order - m) > tol) continue;
        const bool regular = m == 1 && std::abs(pt.trace_slope) > slope_floor;
        cands.push_back({regular ? Stratum::regular : Stratum::singular, m, std::abs(vo.order - m)});
    }
    if (cands.empty()) {
        pt.stratum = Stratum::unclassified;
        std::ostringstream msg;
        msg << "order " << vo.order << " is within " << tol << " of neither k_q=" << d.k_q
            << " nor an integer <= beta_q=" << d.beta_q << "; discretization error suspected";
        pt.note = msg.str();
        return pt;
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    pt.stratum = cands.front().stratum;
    pt.degree = cands.front().degree;

    bool tie = false;
    for (int m = 1; m <= d.beta_q; ++m) tie = tie || std::abs(d.k_q - m) < 2.0 * tol;
    if (tie && cands.size() > 1) {
        for (const auto& c : cands) {
            std::ostringstream s;
            s << to_string(c.stratum);
            if (c.stratum != Stratum::sublinear) s << "(" << c.degree << ")";
            pt.candidates.push_back(s.str());
        }
        pt.note = "k_q within 2 tol of an admissible integer; both readings reported";
    }
    if (pt.stratum == Stratum::regular || pt.stratum == Stratum::singular) {
        try {
            pt.tangent_coefficient = tangent_map(f, x0, pt.degree, p, opts.order).coefficient;
        } catch (const NumericalError& e) {
            pt.note += std::string(pt.note.empty() ? "" : "; ") + e.what();
        }
    }
    return pt;
}

TangentMap tangent_map(const Field& f, double x0, int k, const Parameters& p, const OrderOptions& opts) {
    if (k < 0) throw InvalidArgument("tangent map degree must be >= 0");
    const DerivedExponents d = derive_exponents(p);
    if (k > std::max(d.beta_q, 1)) {
        std::ostringstream msg;
        msg << "tangent map degree " << k << " exceeds beta_q=" << d.beta_q;
        throw InvalidArgument(msg.str());
    }
    const RadiusWindow w = opts.window ? *opts.window : default_window(f, x0);
    const SymmetricPoly poly = sB_basis(f.mesh().a, k);

    TangentMap tm;
    tm.k = k;
    const SphereSamples s = sphere_samples(f, x0, w.r_min, opts.n_theta);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        const double pv = poly(w.r_min * std::cos(s.theta[i]), w.r_min * std::sin(s.theta[i]));
        num += s.weight[i] * s.sin_a[i] * s.u[i] * pv;
        den += s.weight[i] * s.sin_a[i] * pv * pv;
    }
    double Hs = 0.0;
    for (std::size_t i = 0; i < s.u.size(); ++i) Hs += s.weight[i] * s.sin_a[i] * s.u[i] * s.u[i];
    if (!(Hs > opts.h_floor) || !(den > 0.0)) throw DegenerateDenominator("tangent-map fit is ill-conditioned: H at floor");
    tm.coefficient = num / den;

    tm.radii = log_spaced(w.r_min, w.r_max, opts.n_radii);
    const double c = tm.coefficient;
    auto fitted = [&](double x, double y) { return c * poly(x, y); };
    std::vector<double> lr, lm;
    double mmax = 0.0;
    for (double r : tm.radii) {
        const double mv = monneau_val(f, x0, fitted, r, k, opts.n_theta);
        tm.monneau.push_back(mv);
        mmax = std::max(mmax, mv);
    }
    const double floor = 1e-28 * std::max(1.0, Hs);
    for (std::size_t i = 0; i < tm.radii.size(); ++i) {
        if (tm.monneau[i] > floor) {
            lr.push_back(std::log(tm.radii[i]));
            lm.push_back(std::log(tm.monneau[i]));
        }
    }
    tm.monneau_slope = (mmax > floor && lr.size() >= 2) ? ls_slope(lr, lm).first : kNaN;
    return tm;
}

namespace {

BlowupSequence rescale(const std::function<double(double)>& trace, const std::function<double(double)>& norm,
                       const std::vector<double>& radii, Normalization normalization, double k, int n_samples) {
    if (radii.empty()) throw InvalidArgument("blow-up sequence needs radii");
    if (n_samples < 2) throw InvalidArgument("n_samples must be >= 2");
    BlowupSequence seq;
    seq.normalization = normalization;
    seq.k = k;
    seq.radii = radii;
    for (int i = 0; i < n_samples; ++i) seq.xi.push_back(-1.0 + 2.0 * i / (n_samples - 1));
    for (double r : radii) {
        const double rho = normalization == Normalization::power ? std::pow(r, k) : norm(r);
        if (!(rho > 0.0)) throw DegenerateDenominator("blow-up normalization vanishes");
        std::vector<double> tr(seq.xi.size());
        for (std::size_t i = 0; i < tr.size(); ++i) tr[i] = trace(r * seq.xi[i]) / rho;
        seq.traces.push_back(std::move(tr));
        seq.norms.push_back(rho);
    }
    const std::size_t n = radii.size();
    seq.sup_distance.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double dmax = 0.0;
            for (std::size_t q = 0; q < seq.xi.size(); ++q) {
                dmax = std::max(dmax, std::abs(seq.traces[i][q] - seq.traces[j][q]));
            }
            seq.sup_distance[i][j] = seq.sup_distance[j][i] = dmax;
        }
    }
    return seq;
}

}  // namespace

BlowupSequence blowup_sequence(const Field& f, double x0, const std::vector<double>& radii,
                               Normalization normalization, double k, int n_samples, int n_theta) {
    for (double r : radii) check_radius(f, x0, r);
    const Parameters& p = f.params();
    auto norm = [&](double r) {
        const double H = H_val(f, x0, r, n_theta);
        if (normalization == Normalization::H) return std::sqrt(H);
        const double a = f.mesh().a;
        return std::sqrt(std::pow(r, -(p.n + a - 1.0)) * bulk_energy(f, x0, r) + H);
    };
    return rescale([&](double x) { return f.trace(x0 + x); }, norm, radii, normalization, k, n_samples);
}

BlowupSequence blowup_sequence(const HomogeneousField& u, const std::vector<double>& radii,
                               Normalization normalization, double k, int n_samples, int n_theta) {
    const AngularProfile& prof = u.profile();
    const double a = prof.a();
    const double ku = u.degree();
    // r^{-(1+a)} int y^a u^2 = r^{2k} Hphi and r^{-a} int y^a |grad u|^2 = r^{2k} Iphi / (2k + a).
    double Hphi = 0.0, Iphi = 0.0;
    const double dth = std::numbers::pi / n_theta;
    for (int i = 0; i < n_theta; ++i) {
        const double th = (i + 0.5) * dth;
        const FluxState st = prof.state_at(th);
        const double sa = std::pow(std::sin(th), a);
        Hphi += dth * sa * st.phi * st.phi;
        Iphi += dth * (ku * ku * sa * st.phi * st.phi + st.w * st.w / sa);
    }
    auto norm = [&](double r) {
        const double scale = std::pow(r, 2.0 * ku);
        if (normalization == Normalization::H) return std::sqrt(scale * Hphi);
        return std::sqrt(scale * (Iphi / (2.0 * ku + a) + Hphi));
    };
    return rescale([&](double x) { return u.trace(x); }, norm, radii, normalization, k, n_samples);
}

Normalization default_normalization(double order, double k_q, double tol) {
    return std::abs(order - k_q) <= tol ? Normalization::H1a : Normalization::power;
}

NodalReport analyze_nodal_set(const Field& f, const Parameters& p, const ClassifyOptions& opts, double margin) {
    NodalReport rep;
    rep.params = p;
    rep.exponents = derive_exponents(p);
    const double h = x_spacing(f);
    const double mg = margin >= 0.0 ? margin : 24.0 * h;
    const NodalScan scan = trace_nodal_points(f, mg);
    rep.zero_intervals = scan.zero_intervals;
    for (const auto& [a, b] : scan.zero_intervals) {
        std::ostringstream msg;
        msg << "trace vanishes on [" << a << ", " << b << "]: unique-continuation alarm";
        rep.alarms.push_back(msg.str());
    }
    for (const NodalPoint& raw : scan.points) {
        if (raw.kind == NodalKind::interval_endpoint) {
            rep.points.push_back(raw);
            rep.diagnostics.push_back({});
            continue;
        }
        try {
            BlowupDiagnostics dg;
            NodalPoint pt = classify(f, raw.x0, p, rep.exponents, opts, &dg);
            pt.kind = raw.kind;
            rep.diagnostics.push_back(std::move(dg));
            rep.points.push_back(std::move(pt));
        } catch (const DegenerateDenominator& e) {
            rep.alarms.push_back(e.what());
            NodalPoint pt = raw;
            pt.note = e.what();
            rep.points.push_back(pt);
            rep.diagnostics.push_back({});
        } catch (const InvalidArgument& e) {
            NodalPoint pt = raw;
            pt.note = e.what();
            rep.points.push_back(pt);
            rep.diagnostics.push_back({});
        }
    }
    return rep;
}

}  // namespace nodalset
