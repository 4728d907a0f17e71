#pragma once
// Shared between the command runners and the figure runners.

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>

#include "photonstore/cache.hpp"
#include "photonstore/scenario.hpp"

namespace photonstore::detail {

struct Outcome {
  explicit Outcome(std::string file_stem) : stem(std::move(file_stem)) {}

  std::string stem;  // output file stem
  io::Summary summary;
  bool tolerance_met = true;

  /// Records an acceptance check in the summary.
  void check(const std::string& name, double value, const std::string& requirement, bool met);
};

struct Context {
  const Scenario& sc;
  const RunOptions& opt;
  ModeCache& cache;
  std::ostream& log;

  const Config& cfg() const { return sc.config; }
  const Params& params() const { return sc.params; }
  const Grid& grid() const { return sc.grid; }
  bool reference() const { return opt.profile == ToleranceProfile::reference; }
  OptimOptions optim() const;
  std::filesystem::path out(const std::string& file) const { return opt.out_dir / file; }
};

Outcome run_figure(Context& ctx);

/// Column-name friendly number ("0.1", "1000").
std::string tag(double x);

}  // namespace photonstore::detail
