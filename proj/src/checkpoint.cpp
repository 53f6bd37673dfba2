#include "scgk/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <vector>

namespace scgk {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'G', 'K'};
constexpr std::size_t kParamCount = 13;

class Writer {
 public:
  void u32(std::uint32_t x) {
    for (int i = 0; i < 4; ++i) buf_.push_back(char((x >> (8 * i)) & 0xff));
  }
  void f64(double d) {
    const auto x = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) buf_.push_back(char((x >> (8 * i)) & 0xff));
  }
  void raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<char>& b, std::size_t start, const std::string& path) : b_(b), path_(path), pos_(start) {}
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw CheckpointError("truncated checkpoint " + path_);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= std::uint32_t(std::uint8_t(b_[pos_++])) << (8 * i);
    return x;
  }
  double f64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= std::uint64_t(std::uint8_t(b_[pos_++])) << (8 * i);
    return std::bit_cast<double>(x);
  }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  const std::vector<char>& b_;
  std::string path_;
  std::size_t pos_;
};

std::size_t payload_doubles(const ModeGrid& g) { return 5 * g.modes() * g.len() * 2 + 4 * g.len() * 2; }

}  // namespace

void write_checkpoint(const std::string& path, const SpectralState& s, const Params& p) {
  const ModeGrid& g = s.grid();
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(std::uint32_t(g.N1));
  w.u32(std::uint32_t(g.N2));
  w.u32(std::uint32_t(g.N3));
  w.f64(p.P);
  w.f64(p.R);
  w.f64(p.tau);
  w.f64(p.Pm);
  w.f64(p.eta_value());
  for (double e : p.e_r) w.f64(e);
  w.f64(p.L1);
  w.f64(p.L2);
  w.f64(p.harmonic == HarmonicSign::kDecaying ? 1 : 0);
  w.f64(p.linear_only ? 1 : 0);
  w.f64(p.weights == cheb::WeightConvention::kChebyshevIntegral ? 1 : 0);
  w.f64(s.t);
  for (const SpectralField3D* f : {&s.theta, &s.vT, &s.vP, &s.bT, &s.bP})
    for (int n1 = -g.N1; n1 <= g.N1; ++n1)
      for (int n2 = -g.N2; n2 <= g.N2; ++n2)
        for (cplx z : f->mode(n1, n2)) {
          w.f64(z.real());
          w.f64(z.imag());
        }
  for (const ChebSeries<double>* m : {&s.vM1, &s.vM2, &s.bM1, &s.bM2})
    for (std::size_t k = 0; k < g.len(); ++k) {
      w.f64(m->coeff(k));
      w.f64(0.0);
    }

  // write then rename
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot open " + tmp + " for writing");
    f.write(w.bytes().data(), std::streamsize(w.bytes().size()));
    if (!f) throw CheckpointError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint " + path);
  const std::vector<char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CheckpointError("not a checkpoint (bad magic): " + path);
  Reader in(bytes, 4, path);

  Checkpoint c;
  c.version = in.u32();
  if (c.version != kCheckpointVersion)
    throw CheckpointError("unsupported checkpoint version " + std::to_string(c.version) + " in " + path);
  const std::uint32_t n1 = in.u32(), n2 = in.u32(), n3 = in.u32();
  if (n1 > 4096 || n2 > 4096 || n3 < 1 || n3 > 4096) throw CheckpointError("malformed dimensions in " + path);
  in.need(8 * (kParamCount + 1));
  Params& p = c.params;
  p.P = in.f64();
  p.R = in.f64();
  p.tau = in.f64();
  p.Pm = in.f64();
  p.eta = in.f64();
  for (double& e : p.e_r) e = in.f64();
  p.L1 = in.f64();
  p.L2 = in.f64();
  const double h = in.f64(), lin = in.f64(), wc = in.f64();
  if ((h != 0 && h != 1) || (lin != 0 && lin != 1) || (wc != 0 && wc != 1))
    throw CheckpointError("malformed parameter flags in " + path);
  p.harmonic = h == 1 ? HarmonicSign::kDecaying : HarmonicSign::kGrowing;
  p.linear_only = lin == 1;
  p.weights = wc == 1 ? cheb::WeightConvention::kChebyshevIntegral : cheb::WeightConvention::kHalvedT0;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw CheckpointError("malformed parameters in " + path + ": " + e.what());
  }
  c.grid.N1 = int(n1);
  c.grid.N2 = int(n2);
  c.grid.N3 = int(n3);
  c.grid.alpha1 = 2 * std::numbers::pi / p.L1;
  c.grid.alpha2 = 2 * std::numbers::pi / p.L2;
  const double t = in.f64();

  const ModeGrid& g = c.grid;
  if (in.remaining() < 8 * payload_doubles(g)) throw CheckpointError("truncated checkpoint " + path);
  if (in.remaining() > 8 * payload_doubles(g)) throw CheckpointError("trailing bytes in checkpoint " + path);
  SpectralState s(g);
  s.t = t;
  for (SpectralField3D* fld : {&s.theta, &s.vT, &s.vP, &s.bT, &s.bP})
    for (int a = -g.N1; a <= g.N1; ++a)
      for (int b = -g.N2; b <= g.N2; ++b)
        for (cplx& z : fld->mode(a, b)) {
          const double re = in.f64(), im = in.f64();
          z = cplx(re, im);
        }
  for (ChebSeries<double>* m : {&s.vM1, &s.vM2, &s.bM1, &s.bM2})
    for (std::size_t k = 0; k < g.len(); ++k) {
      (*m)[k] = in.f64();
      if (in.f64() != 0) throw CheckpointError("mean field with an imaginary part in " + path);
    }
  c.state = std::move(s);
  return c;
}

Checkpoint read_checkpoint(const std::string& path, int N1, int N2, int N3) {
  Checkpoint c = read_checkpoint(path);
  if (c.grid.N1 != N1 || c.grid.N2 != N2 || c.grid.N3 != N3)
    throw CheckpointError("dimension mismatch in " + path + ": expected (N1, N2, N3) = (" + std::to_string(N1) + ", " +
                          std::to_string(N2) + ", " + std::to_string(N3) + "), found (" + std::to_string(c.grid.N1) +
                          ", " + std::to_string(c.grid.N2) + ", " + std::to_string(c.grid.N3) + ")");
  return c;
}

}  // namespace scgk
