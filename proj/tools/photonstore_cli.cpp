// photonstore command line: one subcommand per scenario kind.
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "photonstore/cache.hpp"
#include "photonstore/scenario.hpp"

using namespace photonstore;

int main(int argc, char** argv) {
  CLI::App app{"photon storage in atomic ensembles: optimal modes, controls and efficiencies"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", profile = "reference", figure;
  int jobs = 1;
  bool no_cache = false;
  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "scenario file (key = value, [section] headers)");
    if (config_required) c->required();
    c->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    sub->add_option("--tolerance-profile", profile, "fast or reference")
        ->check(CLI::IsMember({"fast", "reference"}))
        ->capture_default_str();
    sub->add_flag("--no-cache", no_cache, "do not read or write the optimal-mode disk cache");
  };

  std::vector<std::pair<CLI::App*, Command>> subs;
  for (Command c : {Command::retrieve, Command::store, Command::store_retrieve, Command::optimize_mode,
                    Command::shape_control, Command::sweep}) {
    auto* sub = app.add_subcommand(to_string(c), "");
    common(sub, c == Command::sweep);
    subs.emplace_back(sub, c);
  }
  subs[0].first->description("retrieve a spin wave into a light pulse");
  subs[1].first->description("store an input pulse");
  subs[2].first->description("store, then retrieve (kernel efficiency of the stored wave)");
  subs[3].first->description("optimal spin-wave mode (kernel eigenproblem or time-reversal iteration)");
  subs[4].first->description("shape a retrieval or storage control");
  subs[5].first->description("sweep one parameter of another command");
  auto* fig = app.add_subcommand("figure", "reproduce figure data");
  fig->add_option("id", figure, "figure id")->required()->check(CLI::IsMember(figure_ids()));
  common(fig, false);
  subs.emplace_back(fig, Command::figure);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  Command command = Command::retrieve;
  for (auto& [sub, c] : subs)
    if (sub->parsed()) command = c;

  RunOptions opt;
  opt.out_dir = out_dir;
  opt.jobs = jobs;
  try {
    opt.profile = parse_profile(profile);
    if (!no_cache) opt.cache_dir = default_cache_dir();
    const Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    const Scenario sc = make_scenario(command, cfg, figure, opt.profile);
    return run(sc, opt, std::cerr);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
