#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "scgk/config.hpp"

namespace scgk {

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitIo = 3 };

struct RunOptions {
  std::optional<std::string> output_dir;  // overrides the config
  std::optional<std::string> resume;      // checkpoint to start from
};

// Writes <output_dir>/energies.csv, checkpoint_<step>.scgk every checkpoint_interval steps and
// final.scgk. Messages go to log. Returns an ExitCode.
int run(const RunConfig& cfg, const RunOptions& opt, std::ostream& log);

// header and energies of a checkpoint
int inspect(const std::string& checkpoint, std::ostream& out, std::ostream& log);

}  // namespace scgk
