#include "nodalset/config.hpp"

#include <algorithm>
#include <set>

#include "nodalset/errors.hpp"
#include "nodalset/io.hpp"

namespace nodalset {

using nlohmann::json;

bool IoConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

namespace {

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
}

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    require_object(j, where);
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + (where.empty() ? it.key() : where + "." + it.key()) + "'");
        }
    }
}

template <class T>
void get(const json& j, const std::string& where, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("key '" + where + "." + key + "' has the wrong type");
    }
}

template <class T>
void get_opt(const json& j, const std::string& where, const char* key, std::optional<T>& out) {
    if (!j.contains(key) || j.at(key).is_null()) return;
    T v{};
    get(j, where, key, v);
    out = v;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunConfig parse_config(const json& doc) {
    check_keys(doc, "", {"parameters", "mesh", "solver", "boundary", "angular", "analysis", "io", "verify"});
    RunConfig c;
    if (doc.contains("parameters")) {
        const json& j = doc["parameters"];
        check_keys(j, "parameters", {"s", "q", "lambda_plus", "lambda_minus"});
        get(j, "parameters", "s", c.params.s);
        get(j, "parameters", "q", c.params.q);
        get(j, "parameters", "lambda_plus", c.params.lambda_plus);
        get(j, "parameters", "lambda_minus", c.params.lambda_minus);
    }
    try {
        c.params.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("parameters: ") + e.what());
    }
    if (doc.contains("mesh")) {
        const json& j = doc["mesh"];
        check_keys(j, "mesh", {"L", "Y", "Nx", "My", "gamma"});
        get(j, "mesh", "L", c.mesh.L);
        get(j, "mesh", "Y", c.mesh.Y);
        get(j, "mesh", "Nx", c.mesh.Nx);
        get(j, "mesh", "My", c.mesh.My);
        get_opt(j, "mesh", "gamma", c.mesh.gamma);
    }
    if (!(c.mesh.L > 0) || !(c.mesh.Y > 0)) throw ConfigError("mesh: L and Y must be positive");
    if (c.mesh.Nx < 8 || c.mesh.My < 8 || c.mesh.Nx % 2) throw ConfigError("mesh: Nx must be even and Nx, My >= 8");
    if (c.mesh.gamma && *c.mesh.gamma < 1.0) throw ConfigError("mesh: gamma must be >= 1");
    if (doc.contains("solver")) {
        const json& j = doc["solver"];
        check_keys(j, "solver", {"omega", "tol", "max_iter", "epsilon", "cg_tol", "cg_max_iter"});
        get(j, "solver", "omega", c.solver.omega);
        get(j, "solver", "tol", c.solver.tol);
        get(j, "solver", "max_iter", c.solver.max_iter);
        get_opt(j, "solver", "epsilon", c.solver.epsilon);
        get(j, "solver", "cg_tol", c.solver.cg_tol);
        get(j, "solver", "cg_max_iter", c.solver.cg_max_iter);
    }
    if (!(c.solver.omega > 0 && c.solver.omega <= 1)) throw ConfigError("solver: omega must lie in (0, 1]");
    if (!(c.solver.tol > 0) || c.solver.max_iter < 1) throw ConfigError("solver: tol > 0 and max_iter >= 1 required");
    if (doc.contains("boundary")) {
        const json& j = doc["boundary"];
        check_keys(j, "boundary", {"kind", "terms", "seed", "offset"});
        get(j, "boundary", "kind", c.boundary.kind);
        if (j.contains("terms")) {
            c.boundary.terms.clear();
            if (!j["terms"].is_array()) throw ConfigError("key 'boundary.terms' must be a list of [degree, coefficient]");
            for (const json& t : j["terms"]) {
                if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number()) {
                    throw ConfigError("key 'boundary.terms' must be a list of [degree, coefficient]");
                }
                c.boundary.terms.push_back({t[0].get<int>(), t[1].get<double>()});
            }
        }
        get(j, "boundary", "seed", c.boundary.seed);
        get(j, "boundary", "offset", c.boundary.offset);
    }
    static const std::set<std::string> kinds{"u1", "u2", "poly", "random"};
    if (!kinds.count(c.boundary.kind)) throw ConfigError("boundary.kind must be one of u1, u2, poly, random");
    for (const auto& [k, coef] : c.boundary.terms) {
        if (k < 0) throw ConfigError("boundary.terms: degree must be >= 0");
    }
    if (doc.contains("angular")) {
        const json& j = doc["angular"];
        check_keys(j, "angular", {"profiles", "T_sweep", "samples", "tol"});
        get(j, "angular", "profiles", c.angular.profiles);
        get(j, "angular", "T_sweep", c.angular.T_sweep);
        get(j, "angular", "samples", c.angular.samples);
        get(j, "angular", "tol", c.angular.tol);
    }
    for (const auto& p : c.angular.profiles) {
        if (p != "antisymmetric" && p != "symmetric") throw ConfigError("angular.profiles entries must be antisymmetric or symmetric");
    }
    if (c.angular.T_sweep.empty()) {
        for (int i = 6; i <= 30; ++i) c.angular.T_sweep.push_back(i / 20.0);
    }
    for (double T : c.angular.T_sweep) {
        if (!(T > 0.0 && T < 1.5707963267948966)) throw ConfigError("angular.T_sweep values must lie in (0, pi/2)");
    }
    if (c.angular.samples < 64) throw ConfigError("angular.samples must be >= 64");
    if (doc.contains("analysis")) {
        const json& j = doc["analysis"];
        check_keys(j, "analysis", {"x0", "radii", "r_min", "r_max", "dr", "weiss", "extra_t", "n_theta", "order_tol",
                                   "h_floor", "monotonicity_tol"});
        get_opt(j, "analysis", "x0", c.analysis.x0);
        get(j, "analysis", "radii", c.analysis.radii);
        get_opt(j, "analysis", "r_min", c.analysis.r_min);
        get_opt(j, "analysis", "r_max", c.analysis.r_max);
        get(j, "analysis", "dr", c.analysis.dr);
        if (j.contains("weiss")) {
            if (!j["weiss"].is_array()) throw ConfigError("key 'analysis.weiss' must be a list of [k, t]");
            for (const json& t : j["weiss"]) {
                if (!t.is_array() || t.size() != 2 || !t[0].is_number() || !t[1].is_number()) {
                    throw ConfigError("key 'analysis.weiss' must be a list of [k, t]");
                }
                c.analysis.weiss.push_back({t[0].get<double>(), t[1].get<double>()});
            }
        }
        get(j, "analysis", "extra_t", c.analysis.extra_t);
        get(j, "analysis", "n_theta", c.analysis.n_theta);
        get(j, "analysis", "order_tol", c.analysis.order_tol);
        get(j, "analysis", "h_floor", c.analysis.h_floor);
        get(j, "analysis", "monotonicity_tol", c.analysis.monotonicity_tol);
    }
    if (c.analysis.weiss.empty()) c.analysis.weiss.push_back({derive_exponents(c.params).k_q, 2.0});
    if (!(c.analysis.dr > 0) || c.analysis.n_theta < 8) throw ConfigError("analysis: dr > 0 and n_theta >= 8 required");
    if (doc.contains("io")) {
        const json& j = doc["io"];
        check_keys(j, "io", {"out", "formats"});
        get(j, "io", "out", c.io.out);
        get(j, "io", "formats", c.io.formats);
    }
    for (const auto& f : c.io.formats) {
        if (f != "csv" && f != "json" && f != "svg") throw ConfigError("io.formats entries must be csv, json or svg");
    }
    if (doc.contains("verify")) {
        const json& j = doc["verify"];
        check_keys(j, "verify", {"tolerances", "only"});
        if (j.contains("tolerances")) {
            require_object(j["tolerances"], "verify.tolerances");
            for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
                if (!it.value().is_number()) throw ConfigError("key 'verify.tolerances." + it.key() + "' must be a number");
                c.verify.tolerances[it.key()] = it.value().get<double>();
            }
        }
        get(j, "verify", "only", c.verify.only);
    }
    return c;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::string& path) { return parse_config_text(read_text(path)); }

json RunConfig::canonical() const {
    json terms = json::array();
    for (const auto& [k, c] : boundary.terms) terms.push_back({k, c});
    json weiss = json::array();
    for (const auto& [k, t] : analysis.weiss) weiss.push_back({k, t});
    return json{
        {"parameters", {{"s", params.s}, {"q", params.q}, {"lambda_plus", params.lambda_plus}, {"lambda_minus", params.lambda_minus}}},
        {"mesh", {{"L", mesh.L}, {"Y", mesh.Y}, {"Nx", mesh.Nx}, {"My", mesh.My}, {"gamma", opt_json(mesh.gamma)}}},
        {"solver",
         {{"omega", solver.omega},
          {"tol", solver.tol},
          {"max_iter", solver.max_iter},
          {"epsilon", opt_json(solver.epsilon)},
          {"cg_tol", solver.cg_tol},
          {"cg_max_iter", solver.cg_max_iter}}},
        {"boundary", {{"kind", boundary.kind}, {"terms", terms}, {"seed", boundary.seed}, {"offset", boundary.offset}}},
        {"angular", {{"profiles", angular.profiles}, {"T_sweep", angular.T_sweep}, {"samples", angular.samples}, {"tol", angular.tol}}},
        {"analysis",
         {{"x0", opt_json(analysis.x0)},
          {"radii", analysis.radii},
          {"r_min", opt_json(analysis.r_min)},
          {"r_max", opt_json(analysis.r_max)},
          {"dr", analysis.dr},
          {"weiss", weiss},
          {"extra_t", analysis.extra_t},
          {"n_theta", analysis.n_theta},
          {"order_tol", analysis.order_tol},
          {"h_floor", analysis.h_floor},
          {"monotonicity_tol", analysis.monotonicity_tol}}},
        {"io", {{"out", io.out}, {"formats", io.formats}}},
        {"verify", {{"tolerances", verify.tolerances}, {"only", verify.only}}}};
}

std::string RunConfig::hash() const {
    json c = canonical();
    c["io"].erase("out");   // where results go is not part of what they are
    return fnv1a_hex(c.dump());
}

}  // namespace nodalset
