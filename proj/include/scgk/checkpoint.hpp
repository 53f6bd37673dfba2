#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "scgk/mhd.hpp"

namespace scgk {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout, all little endian:
//   "SCGK", u32 version, u32 N1, N2, N3,
//   f64 P, R, tau, Pm, eta, e_r[0..2], L1, L2, harmonic (0 growing, 1 decaying),
//       linear_only (0/1), weights (0 halved T_0, 1 Chebyshev integral),
//   f64 t,
//   components theta, vT, vP, bT, bP: for n1 = -N1..N1, n2 = -N2..N2, n3 = 0..N3+1, (re, im);
//   means vM1, vM2, bM1, bM2: for n3 = 0..N3+1, (value, 0)
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  ModeGrid grid;
  Params params;
  SpectralState state;
};

void write_checkpoint(const std::string& path, const SpectralState& s, const Params& p);
Checkpoint read_checkpoint(const std::string& path);
// also checks the truncation against the expected one
Checkpoint read_checkpoint(const std::string& path, int N1, int N2, int N3);

}  // namespace scgk
