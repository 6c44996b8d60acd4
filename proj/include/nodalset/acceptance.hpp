#pragma once

#include <map>
#include <string>
#include <vector>

namespace nodalset {

/// Tolerances of the acceptance suite; defaults are the contract values.
struct AcceptanceTolerances {
    double c2_eigen = 1e-8;
    double c3_limit = 0.02;
    double c3_arctan = 1e-4;
    double c4_endpoint = 1e-10;
    double c4_frequency = 0.01;
    double c4_weiss_spread = 1e-3;
    double c5_glue = 1e-8;
    double c5_exponent = 1e-6;
    double c6_ratio = 1.7;
    double c6_runtime = 60.0;
    double c7_error = 0.02;
    double c7_order = 0.05;
    double c8_identity = 5e-2;
    double c9_monotone = 1e-3;
    double c10_order = 0.05;

    /// Applies named overrides; unknown names throw ConfigError.
    void apply(const std::map<std::string, double>& overrides);
    std::map<std::string, double> as_map() const;
};

struct CheckInfo {
    int id = 0;
    std::string name;
    std::string description;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

const std::vector<CheckInfo>& acceptance_checks();

/// Runs the selected criteria (all when `only` is empty) in id order.
/// Exceptions inside a criterion turn into a failing row carrying the message.
std::vector<CheckResult> run_acceptance(const AcceptanceTolerances& tol, const std::vector<int>& only = {},
                                        int workers = 1);

/// One "[PASS] 3 name: detail" line per result.
std::string format_results(const std::vector<CheckResult>& results);

}  // namespace nodalset
