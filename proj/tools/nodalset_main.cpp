// Command-line front end: solve, angular, curve, classify, verify, plot.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nodalset/commands.hpp"
#include "nodalset/config.hpp"
#include "nodalset/errors.hpp"

int main(int argc, char** argv) {
    using namespace nodalset;
    CLI::App app{"nodal sets of two-phase sublinear fractional problems"};
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions opts;
    std::string out, field, csv;
    double x0 = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", out, "output directory (overrides io.out)");
    };
    CLI::App* solve = app.add_subcommand("solve", "solve the boundary-value problem and write a field file");
    add_common(solve);
    solve->add_flag("--allow-nonconverged", opts.allow_nonconverged, "exit 0 even if the iteration did not converge");
    CLI::App* angular = app.add_subcommand("angular", "angular profiles, eigenvalue curves and constants");
    add_common(angular);
    CLI::App* curve = app.add_subcommand("curve", "functional curves of a field at a trace point");
    add_common(curve);
    curve->add_option("--field", field, "field file written by solve")->required();
    CLI::Option* x0_opt = curve->add_option("--x0", x0, "trace point (default analysis.x0 or 0)");
    CLI::App* classify = app.add_subcommand("classify", "locate and classify trace nodal points");
    add_common(classify);
    classify->add_option("--field", field, "field file written by solve")->required();
    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
    add_common(verify);
    verify->add_flag("--list", opts.list, "list the checks without running them");
    CLI::App* plot = app.add_subcommand("plot", "SVG plots of a field file or a CSV table");
    add_common(plot);
    plot->add_option("--field", field, "field file");
    plot->add_option("--csv", csv, "CSV table; the first column is the abscissa");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        const RunConfig cfg = config_path.empty() ? parse_config(nlohmann::json::object()) : load_config(config_path);
        if (!out.empty()) opts.out_dir = out;
        if (!field.empty()) opts.field = field;
        if (!csv.empty()) opts.csv = csv;
        if (*x0_opt) opts.x0 = x0;
        if (solve->parsed()) return cmd_solve(cfg, opts, std::cout);
        if (angular->parsed()) return cmd_angular(cfg, opts, std::cout);
        if (curve->parsed()) return cmd_curve(cfg, opts, std::cout);
        if (classify->parsed()) return cmd_classify(cfg, opts, std::cout);
        if (verify->parsed()) return cmd_verify(cfg, opts, std::cout);
        return cmd_plot(cfg, opts, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitConfig;
    } catch (const OutOfRegime& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
