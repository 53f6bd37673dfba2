#include "scgk/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace scgk {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "': not a number: " + v);
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("'" + key + "': not an integer: " + v);
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const long x = to_long(key, v);
  if (x < -1000000 || x > 1000000) throw ConfigError("'" + key + "': out of range: " + v);
  return int(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "': expected true or false, got " + v);
}

std::array<double, 3> to_vec3(const std::string& key, std::string v) {
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream is(v);
  std::array<double, 3> a{};
  std::string tok;
  int n = 0;
  while (is >> tok) {
    if (n == 3) throw ConfigError("'" + key + "': expected 3 components");
    a[std::size_t(n++)] = to_double(key, tok);
  }
  if (n != 3) throw ConfigError("'" + key + "': expected 3 components");
  return a;
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kEuler: return "euler";
    case Scheme::kRK4: return "rk4";
    case Scheme::kIMEX: return "imex";
  }
  return "unknown";
}

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (N1 < 0 || N2 < 0) throw ConfigError("N1 and N2 must be non-negative");
  if (N3 < 1) throw ConfigError("N3 must be at least 1");
  if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (steps < 0) throw ConfigError("steps must be non-negative");
  if (output_interval < 1) throw ConfigError("output_interval must be at least 1");
  if (checkpoint_interval < 0) throw ConfigError("checkpoint_interval must be non-negative");
  if (initial == InitialCondition::kCheckpoint && initial_checkpoint.empty())
    throw ConfigError("initial_condition = checkpoint needs initial_checkpoint");
  if (initial == InitialCondition::kRoll && N1 < 1) throw ConfigError("initial_condition = roll needs N1 >= 1");
  if (amplitudes.max_mode < 0 || amplitudes.max_degree < 0) throw ConfigError("max_mode and max_degree must be non-negative");
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  Params& p = c.params;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> keys = {
      {"P", [&](auto& k, auto& v) { p.P = to_double(k, v); }},
      {"R", [&](auto& k, auto& v) { p.R = to_double(k, v); }},
      {"tau", [&](auto& k, auto& v) { p.tau = to_double(k, v); }},
      {"Pm", [&](auto& k, auto& v) { p.Pm = to_double(k, v); }},
      {"eta", [&](auto& k, auto& v) { p.eta = to_double(k, v); }},
      {"e_r", [&](auto& k, auto& v) { p.e_r = to_vec3(k, v); }},
      {"L1", [&](auto& k, auto& v) { p.L1 = to_double(k, v); }},
      {"L2", [&](auto& k, auto& v) { p.L2 = to_double(k, v); }},
      {"harmonic",
       [&](auto& k, auto& v) {
         if (v == "growing")
           p.harmonic = HarmonicSign::kGrowing;
         else if (v == "decaying")
           p.harmonic = HarmonicSign::kDecaying;
         else
           throw ConfigError("'" + k + "': expected growing or decaying, got " + v);
       }},
      {"weights",
       [&](auto& k, auto& v) {
         if (v == "chebyshev")
           p.weights = cheb::WeightConvention::kChebyshevIntegral;
         else if (v == "halved_t0")
           p.weights = cheb::WeightConvention::kHalvedT0;
         else
           throw ConfigError("'" + k + "': expected chebyshev or halved_t0, got " + v);
       }},
      {"linear_only", [&](auto& k, auto& v) { p.linear_only = to_bool(k, v); }},
      {"N1", [&](auto& k, auto& v) { c.N1 = to_int(k, v); }},
      {"N2", [&](auto& k, auto& v) { c.N2 = to_int(k, v); }},
      {"N3", [&](auto& k, auto& v) { c.N3 = to_int(k, v); }},
      {"dt", [&](auto& k, auto& v) { c.dt = to_double(k, v); }},
      {"steps", [&](auto& k, auto& v) { c.steps = to_long(k, v); }},
      {"scheme",
       [&](auto& k, auto& v) {
         if (v == "euler")
           c.scheme = Scheme::kEuler;
         else if (v == "rk4")
           c.scheme = Scheme::kRK4;
         else if (v == "imex")
           c.scheme = Scheme::kIMEX;
         else
           throw ConfigError("'" + k + "': expected euler, rk4 or imex, got " + v);
       }},
      {"output_interval", [&](auto& k, auto& v) { c.output_interval = to_long(k, v); }},
      {"checkpoint_interval", [&](auto& k, auto& v) { c.checkpoint_interval = to_long(k, v); }},
      {"output_dir", [&](auto&, auto& v) { c.output_dir = v; }},
      {"initial_condition",
       [&](auto& k, auto& v) {
         if (v == "random")
           c.initial = InitialCondition::kRandom;
         else if (v == "roll")
           c.initial = InitialCondition::kRoll;
         else if (v == "checkpoint")
           c.initial = InitialCondition::kCheckpoint;
         else
           throw ConfigError("'" + k + "': expected random, roll or checkpoint, got " + v);
       }},
      {"initial_checkpoint", [&](auto&, auto& v) { c.initial_checkpoint = v; }},
      {"seed",
       [&](auto& k, auto& v) {
         const long s = to_long(k, v);
         if (s < 0) throw ConfigError("'seed' must be non-negative");
         c.seed = std::uint64_t(s);
       }},
      {"amp_theta", [&](auto& k, auto& v) { c.amplitudes.theta = to_double(k, v); }},
      {"amp_v", [&](auto& k, auto& v) { c.amplitudes.v = to_double(k, v); }},
      {"amp_b", [&](auto& k, auto& v) { c.amplitudes.b = to_double(k, v); }},
      {"max_mode", [&](auto& k, auto& v) { c.amplitudes.max_mode = to_int(k, v); }},
      {"max_degree", [&](auto& k, auto& v) { c.amplitudes.max_degree = to_int(k, v); }},
      {"roll_theta", [&](auto& k, auto& v) { c.roll_theta = to_double(k, v); }},
      {"roll_v", [&](auto& k, auto& v) { c.roll_v = to_double(k, v); }},
      {"roll_b", [&](auto& k, auto& v) { c.roll_b = to_double(k, v); }},
  };

  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq)), value = trim(std::string_view(t).substr(eq + 1));
    auto it = keys.find(key);
    if (it == keys.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(key, value);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  return parse_config(f);
}

std::string format_config(const RunConfig& c) {
  const Params& p = c.params;
  std::ostringstream os;
  os << "P = " << num(p.P) << "\nR = " << num(p.R) << "\ntau = " << num(p.tau) << "\nPm = " << num(p.Pm) << "\n";
  if (p.eta) os << "eta = " << num(*p.eta) << "\n";
  os << "e_r = " << num(p.e_r[0]) << ", " << num(p.e_r[1]) << ", " << num(p.e_r[2]) << "\n";
  os << "L1 = " << num(p.L1) << "\nL2 = " << num(p.L2) << "\n";
  os << "harmonic = " << (p.harmonic == HarmonicSign::kGrowing ? "growing" : "decaying") << "\n";
  os << "weights = " << (p.weights == cheb::WeightConvention::kChebyshevIntegral ? "chebyshev" : "halved_t0") << "\n";
  os << "linear_only = " << (p.linear_only ? "true" : "false") << "\n";
  os << "N1 = " << c.N1 << "\nN2 = " << c.N2 << "\nN3 = " << c.N3 << "\n";
  os << "dt = " << num(c.dt) << "\nsteps = " << c.steps << "\nscheme = " << scheme_name(c.scheme) << "\n";
  os << "output_interval = " << c.output_interval << "\ncheckpoint_interval = " << c.checkpoint_interval << "\n";
  os << "output_dir = " << c.output_dir << "\n";
  switch (c.initial) {
    case InitialCondition::kRandom: os << "initial_condition = random\n"; break;
    case InitialCondition::kRoll: os << "initial_condition = roll\n"; break;
    case InitialCondition::kCheckpoint: os << "initial_condition = checkpoint\n"; break;
  }
  if (!c.initial_checkpoint.empty()) os << "initial_checkpoint = " << c.initial_checkpoint << "\n";
  os << "seed = " << c.seed << "\n";
  os << "amp_theta = " << num(c.amplitudes.theta) << "\namp_v = " << num(c.amplitudes.v) << "\namp_b = "
     << num(c.amplitudes.b) << "\n";
  os << "max_mode = " << c.amplitudes.max_mode << "\nmax_degree = " << c.amplitudes.max_degree << "\n";
  os << "roll_theta = " << num(c.roll_theta) << "\nroll_v = " << num(c.roll_v) << "\nroll_b = " << num(c.roll_b) << "\n";
  return os.str();
}

}  // namespace scgk
