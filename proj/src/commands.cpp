#include "nodalset/commands.hpp"

#include <cmath>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

#include "nodalset/acceptance.hpp"
#include "nodalset/angular.hpp"
#include "nodalset/datasets.hpp"
#include "nodalset/errors.hpp"
#include "nodalset/extension_solver.hpp"
#include "nodalset/functionals.hpp"
#include "nodalset/homogeneous.hpp"
#include "nodalset/io.hpp"
#include "nodalset/nodal.hpp"
#include "nodalset/parallel.hpp"

namespace nodalset {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path out_dir(const RunConfig& cfg, const CommandOptions& opts) { return opts.out_dir ? *opts.out_dir : cfg.io.out; }

void write_json(const fs::path& path, json j, const std::string& hash) {
    j["config_hash"] = hash;
    write_text(path, j.dump(2) + "\n");
}

IntegratorOptions integrator(const RunConfig& cfg) {
    IntegratorOptions o;
    o.samples = cfg.angular.samples;
    o.tol = cfg.angular.tol;
    return o;
}

std::vector<double> column(const CsvTable& t, std::size_t c) {
    std::vector<double> v;
    for (const auto& row : t.rows) v.push_back(row[c]);
    return v;
}

Field load_field(const CommandOptions& opts) {
    if (!opts.field) throw ConfigError("this command needs --field PATH");
    return read_field(*opts.field);
}

std::vector<double> analysis_radii(const RunConfig& cfg, const Field& f, double x0) {
    if (!cfg.analysis.radii.empty()) return cfg.analysis.radii;
    RadiusWindow w;
    if (!cfg.analysis.r_min || !cfg.analysis.r_max) w = default_window(f, x0);
    const double lo = cfg.analysis.r_min.value_or(w.r_min);
    const double hi = cfg.analysis.r_max.value_or(w.r_max);
    if (!(hi > lo && lo > 0)) throw ConfigError("analysis: need 0 < r_min < r_max");
    std::vector<double> r;
    const int n = static_cast<int>(std::floor((hi - lo) / cfg.analysis.dr + 1e-9));
    for (int i = 0; i <= n; ++i) r.push_back(lo + i * cfg.analysis.dr);
    return r;
}

json exponents_json(const DerivedExponents& d) {
    return json{{"a", d.a}, {"k_q", d.k_q}, {"beta_q", d.beta_q}, {"mu", d.mu}};
}

}  // namespace

int cmd_solve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const Parameters& p = cfg.params;
    const DerivedExponents d = derive_exponents(p);
    const std::string hash = cfg.hash();
    const fs::path out = out_dir(cfg, opts);
    const double gamma = cfg.mesh.gamma.value_or(default_grading(d.a));
    auto mesh = std::make_shared<const Mesh>(build_mesh(cfg.mesh.L, cfg.mesh.Y, cfg.mesh.Nx, cfg.mesh.My, gamma, d.a));

    BoundaryFunction data;
    bool analytic = false;
    const std::string& kind = cfg.boundary.kind;
    if (kind == "u1" || kind == "u2") {
        const AngularProfile prof = kind == "u1" ? build_antisymmetric(p, d, integrator(cfg))
                                                 : build_symmetric(p, d, integrator(cfg));
        data = homogeneous_boundary(extend(prof, d.k_q));
        analytic = true;
    } else if (kind == "poly") {
        data = polynomial_boundary(d.a, cfg.boundary.terms);
        analytic = p.lambda_plus == 0.0 && p.lambda_minus == 0.0;
    } else {
        data = random_boundary(cfg.boundary.seed, cfg.boundary.offset);
    }

    NonlinearSolveOptions so;
    so.omega = cfg.solver.omega;
    so.tol = cfg.solver.tol;
    so.max_iter = cfg.solver.max_iter;
    so.epsilon = cfg.solver.epsilon;
    so.linear = {cfg.solver.cg_tol, cfg.solver.cg_max_iter};
    const Field f = solve_nonlinear(assemble(mesh), p, data, so);

    json rep{{"parameters", to_json(p)},
             {"exponents", exponents_json(d)},
             {"mesh", {{"L", mesh->L}, {"Y", mesh->Y}, {"Nx", mesh->Nx}, {"My", mesh->My}, {"gamma", mesh->gamma}}},
             {"boundary", cfg.boundary.kind},
             {"report", to_json(f.report)}};
    if (analytic) {
        // Dirichlet data that is itself a solution: report the discrepancy.
        const Mesh& m = *mesh;
        double num = 0.0, den = 0.0;
        for (int j = 0; j <= m.My; ++j) {
            for (int i = 0; i <= m.Nx; ++i) {
                const double w = m.dual_x[i] * m.ya_row[j];
                const double e = data(m.x[i], m.y[j]);
                num += w * (f.value(i, j) - e) * (f.value(i, j) - e);
                den += w * e * e;
            }
        }
        rep["relative_weighted_l2_error"] = den > 0 ? std::sqrt(num / den) : std::sqrt(num);
    }
    write_field(out / "field.txt", f, hash);
    if (cfg.io.wants("json")) write_json(out / "solve_report.json", rep, hash);
    const CsvTable tr = trace_table(f);
    if (cfg.io.wants("csv")) write_text(out / "trace.csv", tr.to_string(hash));
    if (cfg.io.wants("svg")) {
        write_text(out / "trace.svg", svg_plot({"trace u(x,0)", "x", "u", {{"u(x,0)", column(tr, 0), column(tr, 1)}}}, hash));
        write_text(out / "field.svg", svg_field(f, "u on [-L,L] x [0,Y]", hash));
    }
    log << "solve: " << (f.report.converged ? "converged" : "NOT converged") << " after " << f.report.iterations
        << " iterations (last update " << f.report.final_update << ", boundary residual " << f.report.boundary_residual
        << ")\n";
    if (rep.contains("relative_weighted_l2_error")) {
        log << "solve: relative weighted L2 error against the data " << rep["relative_weighted_l2_error"].get<double>() << "\n";
    }
    log << "solve: wrote " << (out / "field.txt").string() << "\n";
    if (!f.report.converged && !opts.allow_nonconverged) return kExitNumerical;
    return kExitOk;
}

int cmd_angular(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const Parameters& p = cfg.params;
    const DerivedExponents d = derive_exponents(p);
    const std::string hash = cfg.hash();
    const fs::path out = out_dir(cfg, opts);
    const IntegratorOptions io = integrator(cfg);
    json constants{{"parameters", to_json(p)}, {"exponents", exponents_json(d)}};
    int code = kExitOk;
    PlotSpec profiles{"angular profiles", "theta", "phi", {}};

    for (const std::string& which : cfg.angular.profiles) {
        try {
            if (which == "antisymmetric") {
                const AngularProfile prof = build_antisymmetric(p, d, io);
                constants["antisymmetric"] = {{"A1", prof.front().phi},
                                              {"w0", prof.front().w},
                                              {"glue_jump", prof.glue_jump},
                                              {"ode_residual", ode_residual(prof, 0.05)}};
                const CsvTable t = profile_table(prof);
                if (cfg.io.wants("csv")) write_text(out / "profile_antisymmetric.csv", t.to_string(hash));
                profiles.series.push_back({"phi_1", column(t, 0), column(t, 1)});
                log << "angular: A1 = " << prof.front().phi << "\n";
            } else {
                const AngularProfile prof = build_symmetric(p, d, io);
                constants["symmetric"] = {{"A2", prof.front().phi},
                                          {"T_star", prof.glue_points.front()},
                                          {"glue_points", prof.glue_points},
                                          {"glue_jump", prof.glue_jump},
                                          {"ode_residual", ode_residual(prof, 0.05)}};
                const CsvTable t = profile_table(prof);
                if (cfg.io.wants("csv")) write_text(out / "profile_symmetric.csv", t.to_string(hash));
                profiles.series.push_back({"phi_2", column(t, 0), column(t, 1)});
                log << "angular: T* = " << prof.glue_points.front() << ", A2 = " << prof.front().phi << "\n";
            }
        } catch (const OutOfRegime& e) {
            constants[which] = {{"error", {{"kind", "out_of_constructive_regime"}, {"message", e.what()}}}};
            log << "angular: " << which << " profile: " << e.what() << "\n";
            code = kExitNumerical;
        } catch (const NumericalError& e) {
            constants[which] = {{"error", {{"kind", "numerical"}, {"message", e.what()}}}};
            log << "angular: " << which << " profile failed: " << e.what() << "\n";
            code = kExitNumerical;
        }
    }

    const std::vector<double>& Ts = cfg.angular.T_sweep;
    std::vector<EigenResult> mixed(Ts.size()), dirichlet(Ts.size());
    std::vector<std::string> mixed_err(Ts.size()), dirichlet_err(Ts.size());
    parallel_for(Ts.size(), worker_count(), [&](std::size_t i) {
        // A bracket failure leaves a NaN row; the message goes to constants.json.
        const double nan = std::nan("");
        try {
            mixed[i] = eigen_mixed(Ts[i], d.a, 1e-13, io);
        } catch (const NumericalError& e) {
            mixed[i].eigenvalue = mixed[i].k1 = nan;
            mixed_err[i] = e.what();
        }
        try {
            dirichlet[i] = eigen_dirichlet(Ts[i], d.a, 1e-13, io);
        } catch (const NumericalError& e) {
            dirichlet[i].eigenvalue = dirichlet[i].k1 = nan;
            dirichlet_err[i] = e.what();
        }
    });
    json sweep_notes = json::array();
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        if (!mixed_err[i].empty()) sweep_notes.push_back("mixed T=" + format_double(Ts[i]) + ": " + mixed_err[i]);
        if (!dirichlet_err[i].empty()) sweep_notes.push_back("dirichlet T=" + format_double(Ts[i]) + ": " + dirichlet_err[i]);
    }
    constants["sweep_notes"] = sweep_notes;
    CsvTable tm{{"T", "lambda_hat", "k1"}, {}}, td{{"T", "lambda_hat", "k1"}, {}};
    for (std::size_t i = 0; i < Ts.size(); ++i) {
        tm.rows.push_back({Ts[i], mixed[i].eigenvalue, mixed[i].k1});
        td.rows.push_back({Ts[i], dirichlet[i].eigenvalue, dirichlet[i].k1});
    }
    if (cfg.io.wants("csv")) {
        write_text(out / "eigen_mixed.csv", tm.to_string(hash));
        write_text(out / "eigen_dirichlet.csv", td.to_string(hash));
    }
    if (cfg.io.wants("json")) write_json(out / "constants.json", constants, hash);
    if (cfg.io.wants("svg")) {
        if (!profiles.series.empty()) write_text(out / "profiles.svg", svg_plot(profiles, hash));
        PlotSpec ek{"characteristic exponent k1(T)", "T", "k1",
                    {{"mixed", column(tm, 0), column(tm, 2)},
                     {"dirichlet", column(td, 0), column(td, 2)},
                     {"k_q", {Ts.front(), Ts.back()}, {d.k_q, d.k_q}}}};
        write_text(out / "eigen_curves.svg", svg_plot(ek, hash));
    }
    log << "angular: eigen sweeps over " << Ts.size() << " values of T written to " << out.string() << "\n";
    return code;
}

int cmd_curve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const Field f = load_field(opts);
    const Parameters& p = f.params();
    const DerivedExponents d = derive_exponents(p);
    const std::string hash = cfg.hash();
    const fs::path out = out_dir(cfg, opts);
    const double x0 = opts.x0 ? *opts.x0 : cfg.analysis.x0.value_or(0.0);
    const std::vector<double> radii = analysis_radii(cfg, f, x0);

    CurveRequest req;
    req.extra_t = cfg.analysis.extra_t;
    req.weiss = cfg.analysis.weiss;
    req.n_theta = cfg.analysis.n_theta;
    req.h_floor = cfg.analysis.h_floor;
    const FunctionalCurve c = curve(f, x0, radii, req, p);
    const CsvTable t = curve_table(c);
    if (cfg.io.wants("csv")) write_text(out / "curve.csv", t.to_string(hash));

    json summary{{"x0", x0}, {"parameters", to_json(p)}, {"exponents", exponents_json(d)}, {"notes", c.notes}};
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::isfinite(c.defect[i])) worst = std::max(worst, c.defect[i] / std::max(std::abs(c.E_q[i]) / c.r[i], 1e-12));
    }
    summary["identity_max_relative_defect"] = worst;
    json weiss = json::array();
    for (const auto& [kt, col] : c.W) {
        if (kt.second != 2.0) continue;
        const MonotonicityReport m0 = check_monotonicity(c, MonotonicityKind::weiss_k2, {kt.first, 0, 1}, 0.0);
        const MonotonicityReport m =
            check_monotonicity(c, MonotonicityKind::weiss_k2, {kt.first, 0, 1}, cfg.analysis.monotonicity_tol * m0.scale);
        weiss.push_back({{"k", kt.first},
                         {"max_decrease", m.max_decrease},
                         {"scale", m.scale},
                         {"monotone", m.pass},
                         {"monotone_up_to", m.monotone_up_to}});
    }
    summary["weiss"] = weiss;
    if (cfg.io.wants("json")) write_json(out / "curve_summary.json", summary, hash);
    if (cfg.io.wants("svg")) {
        PlotSpec fr{"frequency at x0 = " + format_double(x0), "r", "N", {{"N_q", c.r, c.N_q}, {"N_2", c.r, c.N_2}}};
        write_text(out / "curve_frequency.svg", svg_plot(fr, hash));
        PlotSpec ws{"Weiss functionals", "r", "W", {}};
        for (std::size_t k = 0; k < c.W.size(); ++k) ws.series.push_back({t.columns[9 + c.E_t.size() + k], c.r, c.W[k].second});
        if (!ws.series.empty()) write_text(out / "curve_weiss.svg", svg_plot(ws, hash));
    }
    log << "curve: " << c.size() << " radii at x0=" << x0 << ", identity defect " << worst << "\n";
    return kExitOk;
}

int cmd_classify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const Field f = load_field(opts);
    const std::string hash = cfg.hash();
    const fs::path out = out_dir(cfg, opts);
    ClassifyOptions co;
    co.tol = cfg.analysis.order_tol;
    co.order.n_theta = cfg.analysis.n_theta;
    co.order.h_floor = cfg.analysis.h_floor;
    const NodalReport rep = analyze_nodal_set(f, f.params(), co);
    if (cfg.io.wants("json")) write_json(out / "nodal_report.json", to_json(rep), hash);
    if (cfg.io.wants("csv")) {
        CsvTable t{{"x0", "order", "order_uncertainty", "stratum", "degree", "trace_slope"}, {}};
        for (const NodalPoint& pt : rep.points) {
            t.rows.push_back({pt.x0, pt.order, pt.order_uncertainty, static_cast<double>(pt.stratum),
                              static_cast<double>(pt.degree), pt.trace_slope});
        }
        write_text(out / "nodal_points.csv", t.to_string(hash));
    }
    if (cfg.io.wants("svg")) {
        const CsvTable tr = trace_table(f);
        PlotSpec ps{"trace and classified nodal points", "x", "u", {{"u(x,0)", column(tr, 0), column(tr, 1)}}};
        const Stratum kinds[] = {Stratum::regular, Stratum::singular, Stratum::sublinear, Stratum::unclassified};
        for (Stratum s : kinds) {
            PlotSeries ser{to_string(s), {}, {}, true};
            for (const NodalPoint& pt : rep.points) {
                if (pt.stratum == s) {
                    ser.x.push_back(pt.x0);
                    ser.y.push_back(0.0);
                }
            }
            if (!ser.x.empty()) ps.series.push_back(ser);
        }
        write_text(out / "nodal.svg", svg_plot(ps, hash));
    }
    for (const NodalPoint& pt : rep.points) {
        log << "classify: x0=" << pt.x0 << " " << to_string(pt.kind) << " order " << pt.order << " -> "
            << to_string(pt.stratum);
        if (pt.stratum == Stratum::regular || pt.stratum == Stratum::singular) log << "(" << pt.degree << ")";
        log << "\n";
    }
    for (const std::string& a : rep.alarms) log << "classify: ALARM " << a << "\n";
    if (rep.points.empty()) log << "classify: no nodal points inside the margin\n";
    return rep.alarms.empty() ? kExitOk : kExitNumerical;
}

int cmd_verify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    if (opts.list) {
        for (const CheckInfo& c : acceptance_checks()) log << c.id << " " << c.name << ": " << c.description << "\n";
        return kExitOk;
    }
    AcceptanceTolerances tol;
    tol.apply(cfg.verify.tolerances);
    const std::vector<CheckResult> res = run_acceptance(tol, cfg.verify.only, worker_count());
    log << format_results(res);
    const std::string hash = cfg.hash();
    const fs::path out = out_dir(cfg, opts);
    json rows = json::array();
    bool ok = true;
    for (const CheckResult& r : res) {
        ok = ok && r.pass;
        rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    }
    if (cfg.io.wants("json")) write_json(out / "verify.json", {{"tolerances", tol.as_map()}, {"results", rows}}, hash);
    return ok ? kExitOk : kExitNumerical;
}

int cmd_plot(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log) {
    const std::string hash = cfg.hash();
    const fs::path out = out_dir(cfg, opts);
    if (opts.field) {
        const Field f = read_field(*opts.field);
        const CsvTable tr = trace_table(f);
        write_text(out / "trace.svg", svg_plot({"trace u(x,0)", "x", "u", {{"u(x,0)", column(tr, 0), column(tr, 1)}}}, hash));
        write_text(out / "field.svg", svg_field(f, "u on [-L,L] x [0,Y]", hash));
        log << "plot: wrote trace.svg and field.svg to " << out.string() << "\n";
        return kExitOk;
    }
    if (opts.csv) {
        std::istringstream in(read_text(*opts.csv));
        std::string line;
        std::vector<std::string> header;
        std::vector<std::vector<double>> cols;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> cells;
            std::stringstream ls(line);
            std::string cell;
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (header.empty()) {
                header = cells;
                cols.resize(header.size());
                continue;
            }
            if (cells.size() != header.size()) throw ConfigError(*opts.csv + ": ragged CSV row");
            for (std::size_t c = 0; c < cells.size(); ++c) {
                try {
                    cols[c].push_back(std::stod(cells[c]));
                } catch (const std::exception&) {
                    cols[c].push_back(std::nan(""));
                }
            }
        }
        if (header.size() < 2) throw ConfigError(*opts.csv + ": need at least two columns");
        PlotSpec ps{fs::path(*opts.csv).filename().string(), header[0], "", {}};
        for (std::size_t c = 1; c < header.size(); ++c) ps.series.push_back({header[c], cols[0], cols[c]});
        const fs::path target = out / (fs::path(*opts.csv).stem().string() + ".svg");
        write_text(target, svg_plot(ps, hash));
        log << "plot: wrote " << target.string() << "\n";
        return kExitOk;
    }
    throw ConfigError("plot needs --field PATH or --csv PATH");
}

}  // namespace nodalset
