#pragma once

#include <string>
#include <vector>

#include "epslab/config.hpp"

namespace epslab {

struct RunOutcome {
  /// 0 ok, 1 validation (or a failed check), 2 numerical failure.
  int exit_code = 0;
  std::string message;
  std::vector<std::string> files;  ///< written, relative to out_dir
};

/// Executes the scenario's mode and writes its outputs into out_dir
/// (created if missing). Never throws.
RunOutcome run_scenario(const Scenario& sc, const std::string& out_dir, std::size_t jobs = 1);

}  // namespace epslab
