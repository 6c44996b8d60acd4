#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nodalset/angular.hpp"
#include "nodalset/functionals.hpp"
#include "nodalset/mesh.hpp"
#include "nodalset/nodal.hpp"

namespace nodalset {

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Numbers are written with %.17g so files round-trip exactly.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Column table written as CSV behind a "# config_hash=<hash>" line.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string to_string(const std::string& config_hash) const;
};

/// Field file: a magic line, one JSON header line, the x and y nodes, then
/// one line of Nx + 1 values per y-row from the trace row upward.
void write_field(const std::filesystem::path& path, const Field& f, const std::string& config_hash);
Field read_field(const std::filesystem::path& path);

nlohmann::json to_json(const Parameters& p);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const NodalReport& r);

CsvTable trace_table(const Field& f);
CsvTable profile_table(const AngularProfile& p);
CsvTable curve_table(const FunctionalCurve& c);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;   ///< draw points instead of a polyline
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<PlotSeries> series;
    int width = 720;
    int height = 440;
};

/// Self-contained SVG line plot; NaN entries break the polyline.
std::string svg_plot(const PlotSpec& spec, const std::string& config_hash);

/// Self-contained SVG colour map of a field (at most 160 x 160 cells drawn).
std::string svg_field(const Field& f, const std::string& title, const std::string& config_hash);

}  // namespace nodalset
