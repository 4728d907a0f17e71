#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "photonstore/config.hpp"
#include "photonstore/io.hpp"
#include "photonstore/model.hpp"

namespace photonstore {

enum class Command { retrieve, store, store_retrieve, optimize_mode, shape_control, sweep, figure };
enum class ToleranceProfile { fast, reference };

Command parse_command(const std::string& name);
const char* to_string(Command c);
ToleranceProfile parse_profile(const std::string& name);
const char* to_string(ToleranceProfile p);

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  ToleranceProfile profile = ToleranceProfile::reference;
  /// Disk cache for optimal modes; nullopt disables it.
  std::optional<std::filesystem::path> cache_dir;
};

struct Scenario {
  Command command = Command::retrieve;
  std::string figure;  // figure id for Command::figure
  Params params;
  Grid grid;
  Config config;
};

/// Checks keys, ranges and referenced files; errors carry the config line.
/// Grid defaults depend on the tolerance profile.
Scenario make_scenario(Command command, const Config& config, const std::string& figure, ToleranceProfile profile);

/// Runs the scenario, writing CSV data and a `.summary` sidecar into out_dir.
/// Returns kExitOk, kExitValidation or kExitNumerical (including tolerance not met);
/// diagnostics go to `log`.
int run(const Scenario& scenario, const RunOptions& options, std::ostream& log);

/// Figure ids accepted by the figure command.
const std::vector<std::string>& figure_ids();

}  // namespace photonstore
