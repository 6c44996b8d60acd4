#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "nodalset/config.hpp"

namespace nodalset {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Flags shared by the subcommands.
struct CommandOptions {
    std::optional<std::string> out_dir;   ///< overrides io.out
    bool allow_nonconverged = false;
    bool list = false;
    std::optional<std::string> field;
    std::optional<double> x0;
    std::optional<std::string> csv;
};

/// Each command writes its files and a short summary to `log`, and returns
/// an exit code. Configuration problems throw ConfigError or InvalidArgument;
/// numerical failures throw NumericalError (or a subclass) or OutOfRegime.
int cmd_solve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_angular(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_curve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_classify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);
int cmd_plot(const RunConfig& cfg, const CommandOptions& opts, std::ostream& log);

}  // namespace nodalset
