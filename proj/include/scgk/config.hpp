#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "scgk/mhd.hpp"

namespace scgk {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialCondition { kRandom, kRoll, kCheckpoint };

struct RunConfig {
  Params params;
  int N1 = 4, N2 = 4, N3 = 6;
  double dt = 1e-4;
  long steps = 0;
  Scheme scheme = Scheme::kRK4;
  long output_interval = 1;
  long checkpoint_interval = 0;  // 0: only the final checkpoint
  std::string output_dir = ".";

  InitialCondition initial = InitialCondition::kRandom;
  std::uint64_t seed = 1;
  RandomAmplitudes amplitudes;
  double roll_theta = 0.1, roll_v = 1.0, roll_b = 1e-4;
  std::string initial_checkpoint;

  void validate() const;
};

// key = value lines, '#' starts a comment; unknown or repeated keys are errors
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
// the same format, readable by parse_config
std::string format_config(const RunConfig& c);

std::string scheme_name(Scheme s);

}  // namespace scgk
