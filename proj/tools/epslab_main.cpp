// epslab <mode> --config <path> --out <dir> [--jobs N] [--preset NAME] [--override key=value]...
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epslab/epslab.h"

namespace {

int exit_code(epslab_status st) {
  switch (st) {
    case EPSLAB_OK: return 0;
    case EPSLAB_ERR_VALIDATION:
    case EPSLAB_ERR_ARGUMENT: return 1;
    default: return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singularly perturbed boundary value problem lab"};
  app.set_version_flag("--version", epslab_version());

  std::string mode, config, out;
  std::string preset;
  std::vector<std::string> overrides;
  unsigned jobs = 1;
  app.add_option("mode", mode, "solve | sweep | converge | check")
      ->required()
      ->check(CLI::IsMember({"solve", "sweep", "converge", "check"}));
  app.add_option("--config", config, "scenario file")->required();
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::Range(1u, 256u));
  app.add_option("--preset", preset, "scalar | commuting | wentzell");
  app.add_option("--override", overrides, "section.key=value (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  epslab_scenario* sc = nullptr;
  epslab_status st = epslab_scenario_load(config.c_str(), &sc);
  if (st == EPSLAB_OK && !preset.empty()) st = epslab_scenario_set_preset(sc, preset.c_str());
  for (const auto& o : overrides)
    if (st == EPSLAB_OK) st = epslab_scenario_override(sc, o.c_str());
  if (st == EPSLAB_OK) st = epslab_scenario_set_mode(sc, mode.c_str());
  if (st == EPSLAB_OK) st = epslab_run(sc, out.c_str(), jobs);

  if (st != EPSLAB_OK) std::fprintf(stderr, "epslab: %s\n", epslab_last_error());
  else std::fprintf(stdout, "epslab: %s ok -> %s\n", mode.c_str(), out.c_str());
  epslab_scenario_free(sc);
  return exit_code(st);
}
