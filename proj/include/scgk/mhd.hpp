#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "scgk/fields.hpp"
#include "scgk/solvers_1d.hpp"
#include "scgk/transforms.hpp"

namespace scgk {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Params {
  double P = 1;    // Prandtl number
  double R = 0;    // Rayleigh number
  double tau = 0;  // rotation, Ta = tau^2
  double Pm = 1;   // magnetic Prandtl number
  std::optional<double> eta;  // magnetic diffusivity; P / Pm when unset
  std::array<double, 3> e_r{0, 1, 1};
  double L1 = 2 * std::numbers::pi, L2 = 2 * std::numbers::pi;
  // the growing row matches an exterior field that grows away from the wall and feeds the dynamo
  HarmonicSign harmonic = HarmonicSign::kDecaying;
  bool linear_only = false;  // drop the quadratic terms
  // inner product of the projections; kHalvedT0 gives stable but strongly non-normal
  // poloidal diffusion (transient growth of 40x at N3 = 10)
  cheb::WeightConvention weights = cheb::WeightConvention::kChebyshevIntegral;

  double eta_value() const { return eta ? *eta : P / Pm; }
  void validate() const;
};

// potentials per Fourier mode plus the real mean fields; (0,0) entries of the potentials stay zero
struct SpectralState {
  SpectralField3D theta, vT, vP, bT, bP;
  ChebSeries<double> vM1, vM2, bM1, bM2;
  double t = 0;

  SpectralState() = default;
  explicit SpectralState(const ModeGrid& g);

  const ModeGrid& grid() const { return theta.grid(); }
  void axpy(double a, const SpectralState& x);
  void scale(double a);
  bool all_finite() const;
  double max_abs() const;
};

struct EnergySample {
  double t = 0, E_v = 0, E_b = 0;
};

enum class Scheme { kEuler, kRK4, kIMEX };

struct RandomAmplitudes {
  double theta = 1e-2, v = 1e-2, b = 1e-4;
  int max_mode = 2;    // |n1|, |n2| <= max_mode
  int max_degree = 6;  // Chebyshev degree of the perturbation
};

class Simulator {
 public:
  Simulator(int N1, int N2, int N3, Params p);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const ModeGrid& grid() const { return grid_; }
  const Params& params() const { return p_; }
  const Transformer& transformer() const { return *tr_; }

  SpectralState zero_state() const { return SpectralState(grid_); }

  // projected tendency P_U f(u); the t field of the result is zero
  SpectralState rhs(const SpectralState& s) const;
  SpectralState step_euler(const SpectralState& s, double dt) const;
  SpectralState step_rk4(const SpectralState& s, double dt) const;
  // diffusion implicit, everything else explicit
  SpectralState step_imex(const SpectralState& s, double dt) const;
  SpectralState step(Scheme scheme, const SpectralState& s, double dt) const;

  EnergySample energies(const SpectralState& s) const;
  // worst relative constraint-row residual over every component and mode
  double max_constraint_violation(const SpectralState& s) const;
  VectorField velocity(const SpectralState& s) const;
  VectorField magnetic(const SpectralState& s) const;

  // orthogonal projection of every component onto its boundary-condition space
  void project(SpectralState& s) const;
  SpectralState random_state(std::uint64_t seed, const RandomAmplitudes& a = {}) const;
  // roll along x2: theta ~ cos(a1 x1)(1-x3^2), poloidal velocity potential ~ cos(a1 x1)(1-x3^2)^2,
  // plus a weak random magnetic seed
  SpectralState roll_state(double theta_amp, double v_amp, double b_amp) const;

  const ConstraintSet& constraints(Component c, int n1, int n2) const;

 private:
  struct ModeOps;
  struct ImexOps;
  struct Explicit;

  const ModeOps& mode_ops(int n1, int n2) const { return *ops_[std::size_t(std::abs(n1)) * (grid_.N2 + 1) + std::abs(n2)]; }
  Explicit explicit_terms(const SpectralState& s) const;
  const ImexOps& imex_ops(double dt) const;

  ModeGrid grid_;
  Params p_;
  std::unique_ptr<Transformer> tr_;
  std::vector<std::unique_ptr<ModeOps>> ops_;  // indexed by (|n1|, |n2|)
  MatrixXd gram_;                              // integral of T_m T_n on [-1, 1]
  mutable std::mutex imex_mutex_;
  mutable std::map<double, std::shared_ptr<const ImexOps>> imex_;
};

}  // namespace scgk
