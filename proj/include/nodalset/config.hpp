#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nodalset/params.hpp"

namespace nodalset {

struct MeshConfig {
    double L = 1.0;
    double Y = 1.0;
    int Nx = 128;
    int My = 128;
    std::optional<double> gamma;   ///< default grading when absent
};

struct SolverConfig {
    double omega = 0.7;
    double tol = 1e-10;
    int max_iter = 500;
    std::optional<double> epsilon;
    double cg_tol = 1e-13;
    int cg_max_iter = 100000;
};

/// Dirichlet data for `solve`.
///
/// kind: "u1" (antisymmetric homogeneous solution), "u2" (symmetric one),
/// "poly" (sum of coefficient * p_degree), "random" (seeded smooth data).
struct BoundaryConfig {
    std::string kind = "u1";
    std::vector<std::pair<int, double>> terms{{1, 1.0}};
    std::uint64_t seed = 0;
    double offset = 0.0;
};

struct AngularConfig {
    std::vector<std::string> profiles{"antisymmetric", "symmetric"};
    std::vector<double> T_sweep;   ///< default 0.30, 0.35, ..., 1.50
    int samples = 4096;
    double tol = 1e-12;
};

struct AnalysisConfig {
    std::optional<double> x0;
    std::vector<double> radii;        ///< explicit list; overrides the range below
    std::optional<double> r_min;      ///< default window when absent
    std::optional<double> r_max;
    double dr = 0.01;
    std::vector<std::pair<double, double>> weiss;   ///< default {(k_q, 2)}
    std::vector<double> extra_t;
    int n_theta = 256;
    double order_tol = 0.1;
    double h_floor = 1e-24;
    double monotonicity_tol = 1e-3;
};

struct IoConfig {
    std::string out = "out";
    std::vector<std::string> formats{"csv", "json", "svg"};

    bool wants(const std::string& fmt) const;
};

struct VerifyConfig {
    std::map<std::string, double> tolerances;   ///< overrides of acceptance tolerances
    std::vector<int> only;                      ///< criterion ids; empty means all
};

struct RunConfig {
    Parameters params;
    MeshConfig mesh;
    SolverConfig solver;
    BoundaryConfig boundary;
    AngularConfig angular;
    AnalysisConfig analysis;
    IoConfig io;
    VerifyConfig verify;

    /// Normalized document with every default filled in; hashed for provenance.
    nlohmann::json canonical() const;
    std::string hash() const;
};

/// Strict parse: unknown keys and wrongly typed values throw ConfigError
/// naming the offending key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace nodalset
