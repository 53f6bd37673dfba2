#include "scgk/transforms.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

namespace scgk {

// ---------------------------------------------------------------------------
// SpectralField3D

SpectralField3D::SpectralField3D(const ModeGrid& g, bool real) : g_(g), real_(real), data_(g.modes() * g.len()) {
  if (g.N1 < 0 || g.N2 < 0 || g.N3 < 0) throw std::invalid_argument("ModeGrid: negative truncation");
}

void SpectralField3D::enforce_reality() {
  const std::size_t L = g_.len();
  for (int n2 = 0; n2 <= g_.N2; ++n2)
    for (int n1 = (n2 == 0 ? 0 : -g_.N1); n1 <= g_.N1; ++n1) {
      if (n1 == 0 && n2 == 0) {
        for (auto& x : mode(0, 0)) x = cplx(x.real(), 0.0);
        continue;
      }
      auto src = mode(n1, n2);
      auto dst = mode(-n1, -n2);
      for (std::size_t k = 0; k < L; ++k) dst[k] = std::conj(src[k]);
    }
}

double SpectralField3D::reality_violation() const {
  double worst = 0;
  for (int n1 = -g_.N1; n1 <= g_.N1; ++n1)
    for (int n2 = -g_.N2; n2 <= g_.N2; ++n2) {
      auto a = mode(n1, n2), b = mode(-n1, -n2);
      for (std::size_t k = 0; k < g_.len(); ++k) worst = std::max(worst, std::abs(a[k] - std::conj(b[k])));
    }
  return worst;
}

double SpectralField3D::weighted_norm_sq() const {
  double s = 0;
  const std::size_t L = g_.len();
  for (std::size_t i = 0; i < data_.size(); ++i) s += cheb::weight(i % L) * std::norm(data_[i]);
  return s;
}

double SpectralField3D::max_abs() const {
  double m = 0;
  for (auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool SpectralField3D::all_finite() const {
  for (auto& x : data_)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

void SpectralField3D::set_zero() { std::fill(data_.begin(), data_.end(), cplx{}); }

SpectralField3D& SpectralField3D::operator+=(const SpectralField3D& o) {
  if (!(o.g_ == g_)) throw std::invalid_argument("SpectralField3D: grid mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  real_ = real_ && o.real_;
  return *this;
}

SpectralField3D& SpectralField3D::operator-=(const SpectralField3D& o) {
  if (!(o.g_ == g_)) throw std::invalid_argument("SpectralField3D: grid mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  real_ = real_ && o.real_;
  return *this;
}

SpectralField3D& SpectralField3D::operator*=(double s) {
  for (auto& x : data_) x *= s;
  return *this;
}

void SpectralField3D::axpy(double a, const SpectralField3D& x) {
  if (!(x.g_ == g_)) throw std::invalid_argument("SpectralField3D: grid mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
  real_ = real_ && x.real_;
}

// ---------------------------------------------------------------------------
// Transformer

int smooth_size(int lo) {
  for (int n = std::max(lo, 1);; ++n) {
    int m = n;
    for (int p : {2, 3, 5, 7})
      while (m % p == 0) m /= p;
    if (m == 1) return n;
  }
}

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using fftw_buf = std::unique_ptr<T[], FftwFree>;
template <class T>
fftw_buf<T> fftw_alloc(std::size_t n) {
  T* p = static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1)));
  if (!p) throw std::bad_alloc();
  std::memset(static_cast<void*>(p), 0, sizeof(T) * std::max<std::size_t>(n, 1));
  return fftw_buf<T>(p);
}
}  // namespace

struct Transformer::Plans {
  fftw_plan c2r = nullptr, r2c = nullptr, dct = nullptr;
  std::size_t plane_c = 0, plane_r = 0, ncol = 0;
  int P2h = 0;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (c2r) fftw_destroy_plan(c2r);
    if (r2c) fftw_destroy_plan(r2c);
    if (dct) fftw_destroy_plan(dct);
  }
};

Transformer::Transformer(const ModeGrid& g)
    : Transformer(g, smooth_size((3 * g.m1() + 1) / 2), smooth_size((3 * g.m2() + 1) / 2),
                  smooth_size((3 * (g.N3 + 2) + 1) / 2)) {}

Transformer::Transformer(const ModeGrid& g, int P1, int P2, int P3) : g_(g), P1_(P1), P2_(P2), P3_(P3) {
  if (2 * P1 < 3 * g.m1() || 2 * P2 < 3 * g.m2() || 2 * P3 < 3 * (g.N3 + 2))
    throw std::invalid_argument("Transformer: physical grid too small for 3/2 dealiasing");
  plans_ = std::make_unique<Plans>();
  auto& p = *plans_;
  p.P2h = P2 / 2 + 1;
  p.plane_c = std::size_t(P1) * p.P2h;
  p.plane_r = std::size_t(P1) * P2;
  p.ncol = std::size_t(g.m1()) * std::size_t(g.N2 + 1);
  const int nz = P3 + 1;
  auto cbuf = fftw_alloc<fftw_complex>(p.plane_c * nz);
  auto rbuf = fftw_alloc<double>(p.plane_r * nz);
  auto colbuf = fftw_alloc<double>(2 * p.ncol * nz);
  int n2d[2] = {P1, P2};
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps the plans, and therefore the rounding, identical from run to run
  p.c2r = fftw_plan_many_dft_c2r(2, n2d, nz, cbuf.get(), nullptr, 1, int(p.plane_c), rbuf.get(), nullptr, 1,
                                 int(p.plane_r), FFTW_ESTIMATE);
  p.r2c = fftw_plan_many_dft_r2c(2, n2d, nz, rbuf.get(), nullptr, 1, int(p.plane_r), cbuf.get(), nullptr, 1,
                                 int(p.plane_c), FFTW_ESTIMATE);
  fftw_r2r_kind kind = FFTW_REDFT00;
  int n1d[1] = {nz};
  p.dct = fftw_plan_many_r2r(1, n1d, int(2 * p.ncol), colbuf.get(), nullptr, 1, nz, colbuf.get(), nullptr, 1, nz,
                             &kind, FFTW_ESTIMATE);
  if (!p.c2r || !p.r2c || !p.dct) throw std::runtime_error("Transformer: FFTW planning failed");
}

Transformer::~Transformer() = default;

double Transformer::z(int k) const { return std::cos(M_PI * double(k) / double(P3_)); }

PhysicalField3D Transformer::to_physical(const SpectralField3D& u) const {
  if (!(u.grid() == g_)) throw std::invalid_argument("to_physical: grid mismatch");
  if (!u.is_real()) throw std::invalid_argument("to_physical: field is not flagged real");
  const auto& p = *plans_;
  const int nz = P3_ + 1;
  const std::size_t L = g_.len();
  auto colbuf = fftw_alloc<double>(2 * p.ncol * nz);
  std::size_t c = 0;
  for (int n1 = -g_.N1; n1 <= g_.N1; ++n1)
    for (int n2 = 0; n2 <= g_.N2; ++n2, ++c) {
      auto m = u.mode(n1, n2);
      double* re = colbuf.get() + 2 * c * nz;
      double* im = re + nz;
      for (std::size_t k = 0; k < L && k < std::size_t(nz); ++k) {
        const double s = (k == 0 || k == std::size_t(P3_)) ? 1.0 : 0.5;
        re[k] = s * m[k].real();
        im[k] = s * m[k].imag();
      }
    }
  fftw_execute_r2r(p.dct, colbuf.get(), colbuf.get());
  auto cbuf = fftw_alloc<fftw_complex>(p.plane_c * nz);
  c = 0;
  for (int n1 = -g_.N1; n1 <= g_.N1; ++n1) {
    const int i1 = (n1 + P1_) % P1_;
    for (int n2 = 0; n2 <= g_.N2; ++n2, ++c) {
      const double* re = colbuf.get() + 2 * c * nz;
      const double* im = re + nz;
      for (int k = 0; k < nz; ++k) {
        fftw_complex& dst = cbuf[std::size_t(k) * p.plane_c + std::size_t(i1) * p.P2h + n2];
        dst[0] = re[k];
        dst[1] = im[k];
      }
    }
  }
  auto rbuf = fftw_alloc<double>(p.plane_r * nz);
  fftw_execute_dft_c2r(p.c2r, cbuf.get(), rbuf.get());
  PhysicalField3D out(P1_, P2_, P3_);
  std::copy(rbuf.get(), rbuf.get() + out.values.size(), out.values.begin());
  return out;
}

SpectralField3D Transformer::to_spectral(const PhysicalField3D& phys) const {
  if (phys.P1 != P1_ || phys.P2 != P2_ || phys.P3 != P3_ ||
      phys.values.size() != std::size_t(P1_) * P2_ * (P3_ + 1))
    throw std::invalid_argument("to_spectral: physical grid " + std::to_string(phys.P1) + "x" +
                                std::to_string(phys.P2) + "x" + std::to_string(phys.P3 + 1) + " does not match " +
                                std::to_string(P1_) + "x" + std::to_string(P2_) + "x" + std::to_string(P3_ + 1));
  const auto& p = *plans_;
  const int nz = P3_ + 1;
  auto rbuf = fftw_alloc<double>(p.plane_r * nz);
  std::copy(phys.values.begin(), phys.values.end(), rbuf.get());
  auto cbuf = fftw_alloc<fftw_complex>(p.plane_c * nz);
  fftw_execute_dft_r2c(p.r2c, rbuf.get(), cbuf.get());
  const double scale = 1.0 / (double(P1_) * double(P2_));
  auto colbuf = fftw_alloc<double>(2 * p.ncol * nz);
  std::size_t c = 0;
  for (int n1 = -g_.N1; n1 <= g_.N1; ++n1) {
    const int i1 = (n1 + P1_) % P1_;
    for (int n2 = 0; n2 <= g_.N2; ++n2, ++c) {
      double* re = colbuf.get() + 2 * c * nz;
      double* im = re + nz;
      for (int k = 0; k < nz; ++k) {
        const fftw_complex& src = cbuf[std::size_t(k) * p.plane_c + std::size_t(i1) * p.P2h + n2];
        re[k] = src[0] * scale;
        im[k] = src[1] * scale;
      }
    }
  }
  fftw_execute_r2r(p.dct, colbuf.get(), colbuf.get());
  SpectralField3D u(g_, true);
  const std::size_t L = g_.len();
  c = 0;
  for (int n1 = -g_.N1; n1 <= g_.N1; ++n1)
    for (int n2 = 0; n2 <= g_.N2; ++n2, ++c) {
      const double* re = colbuf.get() + 2 * c * nz;
      const double* im = re + nz;
      auto m = u.mode(n1, n2);
      for (std::size_t k = 0; k < L; ++k) {
        const double cb = (k == 0 || k == std::size_t(P3_)) ? 2.0 : 1.0;
        m[k] = cplx(re[k], im[k]) / (double(P3_) * cb);
      }
    }
  u.enforce_reality();
  return u;
}

namespace {
// u = re + i im with re, im real fields
void split_real_imag(const SpectralField3D& u, SpectralField3D& re, SpectralField3D& im) {
  const ModeGrid& g = u.grid();
  re = SpectralField3D(g, true);
  im = SpectralField3D(g, true);
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      auto a = u.mode(n1, n2), b = u.mode(-n1, -n2);
      auto r = re.mode(n1, n2), i = im.mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k) {
        r[k] = 0.5 * (a[k] + std::conj(b[k]));
        i[k] = (a[k] - std::conj(b[k])) / cplx(0, 2);
      }
    }
}
}  // namespace

SpectralField3D Transformer::pointwise_product(const SpectralField3D& a, const SpectralField3D& b) const {
  if (!(a.grid() == g_) || !(b.grid() == g_)) throw std::invalid_argument("pointwise_product: grid mismatch");
  auto real_product = [&](const SpectralField3D& x, const SpectralField3D& y) {
    PhysicalField3D px = to_physical(x), py = to_physical(y);
    for (std::size_t i = 0; i < px.values.size(); ++i) px.values[i] *= py.values[i];
    return to_spectral(px);
  };
  if (a.is_real() && b.is_real()) return real_product(a, b);
  SpectralField3D ar, ai, br, bi;
  split_real_imag(a, ar, ai);
  split_real_imag(b, br, bi);
  SpectralField3D rr = real_product(ar, br), ii = real_product(ai, bi);
  SpectralField3D ri = real_product(ar, bi), ir = real_product(ai, br);
  SpectralField3D out(g_, false);
  for (std::size_t i = 0; i < out.data().size(); ++i)
    out.data()[i] = rr.data()[i] - ii.data()[i] + cplx(0, 1) * (ri.data()[i] + ir.data()[i]);
  return out;
}

}  // namespace scgk
