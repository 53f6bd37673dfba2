#include "scgk/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "scgk/checkpoint.hpp"

namespace scgk {

namespace fs = std::filesystem;

namespace {

std::string csv_row(const EnergySample& e) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", e.t, e.E_v, e.E_b);
  return buf;
}

std::string checkpoint_name(long step) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "checkpoint_%08ld.scgk", step);
  return buf;
}

SpectralState initial_state(const RunConfig& cfg, const RunOptions& opt, const Simulator& sim, std::ostream& log) {
  std::string path;
  if (opt.resume)
    path = *opt.resume;
  else if (cfg.initial == InitialCondition::kCheckpoint)
    path = cfg.initial_checkpoint;
  if (!path.empty()) {
    Checkpoint c = read_checkpoint(path, cfg.N1, cfg.N2, cfg.N3);
    if (!(c.grid == sim.grid())) throw ConfigError("checkpoint " + path + " has different periods L1, L2");
    const Params& a = c.params;
    const Params& b = cfg.params;
    if (a.P != b.P || a.R != b.R || a.tau != b.tau || a.Pm != b.Pm || a.eta_value() != b.eta_value() || a.e_r != b.e_r)
      log << "note: checkpoint parameters differ from the config; using the config\n";
    return c.state;
  }
  if (cfg.initial == InitialCondition::kRoll) return sim.roll_state(cfg.roll_theta, cfg.roll_v, cfg.roll_b);
  return sim.random_state(cfg.seed, cfg.amplitudes);
}

}  // namespace

int run(const RunConfig& cfg, const RunOptions& opt, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const fs::path dir = opt.output_dir ? fs::path(*opt.output_dir) : fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << dir.string() << ": " << ec.message() << "\n";
    return kExitIo;
  }

  long step = 0;
  try {
    Simulator sim(cfg.N1, cfg.N2, cfg.N3, cfg.params);
    SpectralState s = initial_state(cfg, opt, sim, log);
    if (cfg.scheme == Scheme::kIMEX) sim.step_imex(sim.zero_state(), cfg.dt);  // factorize the implicit solves up front

    std::ofstream csv(dir / "energies.csv", std::ios::trunc);
    if (!csv) {
      log << "error: cannot write " << (dir / "energies.csv").string() << "\n";
      return kExitIo;
    }
    csv << "t,E_v,E_b\n" << csv_row(sim.energies(s));
    for (step = 1; step <= cfg.steps; ++step) {
      s = sim.step(cfg.scheme, s, cfg.dt);
      if (!s.all_finite()) throw NumericalError("non-finite values after the step");
      if (step % cfg.output_interval == 0) csv << csv_row(sim.energies(s));
      if (cfg.checkpoint_interval > 0 && step % cfg.checkpoint_interval == 0)
        write_checkpoint((dir / checkpoint_name(step)).string(), s, cfg.params);
    }
    csv.flush();
    if (!csv) {
      log << "error: writing " << (dir / "energies.csv").string() << " failed\n";
      return kExitIo;
    }
    write_checkpoint((dir / "final.scgk").string(), s, cfg.params);
    const EnergySample e = sim.energies(s);
    log << "done: " << cfg.steps << " steps, t = " << e.t << ", E_v = " << e.E_v << ", E_b = " << e.E_b << "\n";
    return kExitOk;
  } catch (const NumericalError& e) {
    log << "numerical failure at step " << step << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const CheckpointError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int inspect(const std::string& checkpoint, std::ostream& out, std::ostream& log) {
  try {
    const Checkpoint c = read_checkpoint(checkpoint);
    const Params& p = c.params;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "version = %u\nN1 = %d\nN2 = %d\nN3 = %d\nP = %.17g\nR = %.17g\ntau = %.17g\nPm = %.17g\neta = %.17g\n"
                  "e_r = %.17g, %.17g, %.17g\nL1 = %.17g\nL2 = %.17g\nharmonic = %s\nlinear_only = %s\nweights = %s\n"
                  "t = %.17g\n",
                  c.version, c.grid.N1, c.grid.N2, c.grid.N3, p.P, p.R, p.tau, p.Pm, p.eta_value(), p.e_r[0], p.e_r[1],
                  p.e_r[2], p.L1, p.L2, p.harmonic == HarmonicSign::kGrowing ? "growing" : "decaying",
                  p.linear_only ? "true" : "false",
                  p.weights == cheb::WeightConvention::kChebyshevIntegral ? "chebyshev" : "halved_t0", c.state.t);
    out << buf;
    Simulator sim(c.grid.N1, c.grid.N2, c.grid.N3, p);
    const EnergySample e = sim.energies(c.state);
    std::snprintf(buf, sizeof buf, "E_v = %.17g\nE_b = %.17g\nconstraint_violation = %.3g\n", e.E_v, e.E_b,
                  sim.max_constraint_violation(c.state));
    out << buf;
    return kExitOk;
  } catch (const CheckpointError& e) {
    log << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace scgk
