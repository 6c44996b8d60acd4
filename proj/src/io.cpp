#include "nodalset/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "nodalset/errors.hpp"

namespace nodalset {

using nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string CsvTable::to_string(const std::string& config_hash) const {
    std::string out = "# config_hash=" + config_hash + "\n";
    for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += format_double(row[c]);
        }
        out += "\n";
    }
    return out;
}

json to_json(const Parameters& p) {
    return json{{"s", p.s}, {"q", p.q}, {"lambda_plus", p.lambda_plus}, {"lambda_minus", p.lambda_minus}, {"n", p.n}};
}

json to_json(const SolveReport& r) {
    return json{{"iterations", r.iterations},
                {"final_update", r.final_update},
                {"converged", r.converged},
                {"interior_residual", r.interior_residual},
                {"boundary_residual", r.boundary_residual},
                {"epsilon", r.epsilon},
                {"omega", r.omega},
                {"cg_iterations", r.cg_iterations}};
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number_or_null(x));
    return a;
}

}  // namespace

json to_json(const NodalReport& r) {
    json pts = json::array();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        const NodalPoint& p = r.points[i];
        json jp{{"x0", p.x0},
                {"kind", to_string(p.kind)},
                {"order", number_or_null(p.order)},
                {"order_uncertainty", number_or_null(p.order_uncertainty)},
                {"stratum", to_string(p.stratum)},
                {"degree", p.degree},
                {"trace_slope", number_or_null(p.trace_slope)},
                {"tangent_coefficient", number_or_null(p.tangent_coefficient)},
                {"candidates", p.candidates},
                {"note", p.note}};
        if (i < r.diagnostics.size() && !r.diagnostics[i].radii.empty()) {
            const BlowupDiagnostics& d = r.diagnostics[i];
            json dy = json::array();
            for (const auto& [rr, sl] : d.dyadic_slopes) dy.push_back({rr, number_or_null(sl)});
            jp["diagnostics"] = json{{"radii", vec_json(d.radii)},
                                     {"H", vec_json(d.H)},
                                     {"N_q", vec_json(d.N_q)},
                                     {"dyadic_slopes", dy},
                                     {"slope_order", number_or_null(d.slope_order)},
                                     {"slope_stderr", number_or_null(d.slope_stderr)},
                                     {"plateau_order", number_or_null(d.plateau_order)},
                                     {"gap", number_or_null(d.gap)},
                                     {"estimator", d.estimator}};
        }
        pts.push_back(jp);
    }
    json zi = json::array();
    for (const auto& [a, b] : r.zero_intervals) zi.push_back({a, b});
    return json{{"parameters", to_json(r.params)},
                {"exponents",
                 {{"a", r.exponents.a}, {"k_q", r.exponents.k_q}, {"beta_q", r.exponents.beta_q}, {"mu", r.exponents.mu}}},
                {"points", pts},
                {"zero_intervals", zi},
                {"alarms", r.alarms}};
}

void write_field(const std::filesystem::path& path, const Field& f, const std::string& config_hash) {
    const Mesh& m = f.mesh();
    json header{{"format", "nodalset-field"},
                {"version", 1},
                {"config_hash", config_hash},
                {"parameters", to_json(f.params())},
                {"mesh", {{"L", m.L}, {"Y", m.Y}, {"Nx", m.Nx}, {"My", m.My}, {"gamma", m.gamma}, {"a", m.a}}},
                {"report", to_json(f.report)}};
    std::string out = "nodalset-field 1\n" + header.dump() + "\n";
    auto line = [&](const char* tag, const std::vector<double>& v) {
        out += tag;
        for (double x : v) out += " " + format_double(x);
        out += "\n";
    };
    line("x", m.x);
    line("y", m.y);
    for (int j = 0; j <= m.My; ++j) {
        for (int i = 0; i <= m.Nx; ++i) {
            if (i) out += " ";
            out += format_double(f.value(i, j));
        }
        out += "\n";
    }
    write_text(path, out);
}

Field read_field(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string magic, header_line;
    std::getline(in, magic);
    if (magic != "nodalset-field 1") throw ConfigError(path.string() + ": not a nodalset field file");
    std::getline(in, header_line);
    json h;
    try {
        h = json::parse(header_line);
        const json& jm = h.at("mesh");
        const json& jp = h.at("parameters");
        Parameters p = Parameters::make(jp.at("s"), jp.at("q"), jp.at("lambda_plus"), jp.at("lambda_minus"),
                                        jp.value("n", 1));
        auto mesh = std::make_shared<const Mesh>(build_mesh(jm.at("L"), jm.at("Y"), jm.at("Nx"), jm.at("My"),
                                                            jm.at("gamma"), jm.at("a")));
        auto read_nodes = [&](const char* tag, const std::vector<double>& expect) {
            std::string t;
            in >> t;
            if (t != tag) throw ConfigError(path.string() + ": expected '" + tag + "' line");
            for (double e : expect) {
                double v;
                if (!(in >> v)) throw ConfigError(path.string() + ": truncated node list");
                if (std::abs(v - e) > 1e-12 * std::max(1.0, std::abs(e))) {
                    throw ConfigError(path.string() + ": node coordinates disagree with the mesh header");
                }
            }
        };
        read_nodes("x", mesh->x);
        read_nodes("y", mesh->y);
        std::vector<double> values(mesh->nodes());
        for (double& v : values) {
            std::string tok;
            if (!(in >> tok)) throw ConfigError(path.string() + ": truncated value block");
            v = std::stod(tok);
        }
        Field f(mesh, p, std::move(values));
        if (h.contains("report")) {
            const json& r = h["report"];
            f.report.iterations = r.value("iterations", 0);
            f.report.final_update = r.value("final_update", 0.0);
            f.report.converged = r.value("converged", false);
            f.report.interior_residual = r.value("interior_residual", 0.0);
            f.report.boundary_residual = r.value("boundary_residual", 0.0);
            f.report.epsilon = r.value("epsilon", 0.0);
            f.report.omega = r.value("omega", 1.0);
            f.report.cg_iterations = r.value("cg_iterations", 0L);
        }
        return f;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": malformed header: " + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

CsvTable trace_table(const Field& f) {
    CsvTable t{{"x", "u"}, {}};
    for (int i = 0; i <= f.mesh().Nx; ++i) t.rows.push_back({f.mesh().x[i], f.value(i, 0)});
    return t;
}

CsvTable profile_table(const AngularProfile& p) {
    CsvTable t{{"theta", "phi", "w"}, {}};
    for (std::size_t i = 0; i < p.theta().size(); ++i) t.rows.push_back({p.theta()[i], p.phi()[i], p.w()[i]});
    return t;
}

CsvTable curve_table(const FunctionalCurve& c) {
    CsvTable t;
    t.columns = {"r", "H", "E_q", "E_2", "N_q", "N_2", "trace_F", "dHdr", "defect"};
    auto fmt = [](double v) {
        std::ostringstream s;
        s << v;
        return s.str();
    };
    for (const auto& [tt, col] : c.E_t) t.columns.push_back("E_t=" + fmt(tt));
    for (const auto& [kt, col] : c.W) t.columns.push_back("W_k=" + fmt(kt.first) + "_t=" + fmt(kt.second));
    if (!c.monneau.empty()) t.columns.push_back("monneau");
    t.columns.push_back("flagged");
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::vector<double> row{c.r[i], c.H[i], c.E_q[i], c.E_2[i], c.N_q[i], c.N_2[i], c.trace_F[i], c.dHdr[i], c.defect[i]};
        for (const auto& [tt, col] : c.E_t) row.push_back(col[i]);
        for (const auto& [kt, col] : c.W) row.push_back(col[i]);
        if (!c.monneau.empty()) row.push_back(c.monneau[i]);
        row.push_back(c.flagged[i] ? 1.0 : 0.0);
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::string svg_plot(const PlotSpec& spec, const std::string& config_hash) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax - xmin <= 0) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin <= 1e-300) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const double W = spec.width, Hh = spec.height;
    const double ml = 70, mr = 20, mt = 36, mb = 50;
    const double pw = W - ml - mr, ph = Hh - mt - mb;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
      << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<!-- config_hash=" << config_hash << " -->\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << num(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(spec.title)
      << "</text>\n";
    o << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 5.0;
        const double yv = ymin + (ymax - ymin) * t / 5.0;
        o << "<line x1=\"" << num(X(xv)) << "\" y1=\"" << num(mt + ph) << "\" x2=\"" << num(X(xv)) << "\" y2=\""
          << num(mt + ph + 4) << "\" stroke=\"#444\"/>\n";
        o << "<text x=\"" << num(X(xv)) << "\" y=\"" << num(mt + ph + 16) << "\" text-anchor=\"middle\">" << fmt_tick(xv)
          << "</text>\n";
        o << "<line x1=\"" << num(ml - 4) << "\" y1=\"" << num(Y(yv)) << "\" x2=\"" << num(ml) << "\" y2=\"" << num(Y(yv))
          << "\" stroke=\"#444\"/>\n";
        o << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(Y(yv) + 4) << "\" text-anchor=\"end\">" << fmt_tick(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(Hh - 10) << "\" text-anchor=\"middle\">"
      << xml_escape(spec.xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << num(mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(mt + ph / 2) << ")\">" << xml_escape(spec.ylabel) << "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const PlotSeries& s = spec.series[k];
        const char* col = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                o << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\"4\" fill=\"" << col
                  << "\"/>\n";
            }
        } else {
            std::string pts;
            auto flush = [&]() {
                if (!pts.empty()) o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
                pts.clear();
            };
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    flush();
                    continue;
                }
                pts += num(X(s.x[i])) + "," + num(Y(s.y[i])) + " ";
            }
            flush();
        }
        const double ly = mt + 14 + 14 * k;
        o << "<rect x=\"" << num(ml + pw - 150) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\"" << col
          << "\"/>\n";
        o << "<text x=\"" << num(ml + pw - 134) << "\" y=\"" << num(ly + 1) << "\">" << xml_escape(s.name) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::string svg_field(const Field& f, const std::string& title, const std::string& config_hash) {
    const Mesh& m = f.mesh();
    const int si = std::max(1, (m.Nx + 159) / 160);
    const int sj = std::max(1, (m.My + 159) / 160);
    double vmax = 0.0;
    for (double v : f.values()) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) vmax = 1.0;
    const double W = 720, Hh = 420, ml = 50, mt = 36;
    const double pw = W - ml - 30, ph = Hh - mt - 40;
    auto X = [&](double x) { return ml + (x + m.L) / (2 * m.L) * pw; };
    auto Y = [&](double y) { return mt + (m.Y - y) / m.Y * ph; };
    auto colour = [&](double v) {
        const double t = std::clamp(v / vmax, -1.0, 1.0);
        const int hi = 255, lo = static_cast<int>(255 * (1.0 - std::abs(t)));
        char buf[8];
        if (t >= 0) std::snprintf(buf, sizeof buf, "#%02x%02x%02x", hi, lo, lo);
        else std::snprintf(buf, sizeof buf, "#%02x%02x%02x", lo, lo, hi);
        return std::string(buf);
    };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"420\" viewBox=\"0 0 720 420\" "
         "font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<!-- config_hash=" << config_hash << " -->\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"360\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    for (int j = 0; j < m.My; j += sj) {
        const int j2 = std::min(j + sj, m.My);
        for (int i = 0; i < m.Nx; i += si) {
            const int i2 = std::min(i + si, m.Nx);
            const double v = f(0.5 * (m.x[i] + m.x[i2]), 0.5 * (m.y[j] + m.y[j2]));
            o << "<rect x=\"" << num(X(m.x[i])) << "\" y=\"" << num(Y(m.y[j2])) << "\" width=\""
              << num(X(m.x[i2]) - X(m.x[i]) + 0.3) << "\" height=\"" << num(Y(m.y[j]) - Y(m.y[j2]) + 0.3)
              << "\" fill=\"" << colour(v) << "\"/>\n";
        }
    }
    o << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    o << "<text x=\"" << num(ml) << "\" y=\"" << num(mt + ph + 16) << "\">x=" << fmt_tick(-m.L) << "</text>\n";
    o << "<text x=\"" << num(ml + pw) << "\" y=\"" << num(mt + ph + 16) << "\" text-anchor=\"end\">x=" << fmt_tick(m.L)
      << "</text>\n";
    o << "<text x=\"" << num(ml + pw / 2) << "\" y=\"" << num(mt + ph + 30) << "\" text-anchor=\"middle\">colour scale +-"
      << fmt_tick(vmax) << " (red positive, blue negative)</text>\n";
    o << "</svg>\n";
    return o.str();
}

}  // namespace nodalset
