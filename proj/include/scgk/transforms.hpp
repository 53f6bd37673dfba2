#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "scgk/chebyshev.hpp"

namespace scgk {

// Retained modes |n1| <= N1, |n2| <= N2, 0 <= n3 <= N3+1; wavenumbers alpha1 n1, alpha2 n2.
struct ModeGrid {
  int N1 = 0, N2 = 0, N3 = 0;
  double alpha1 = 1, alpha2 = 1;

  int m1() const { return 2 * N1 + 1; }
  int m2() const { return 2 * N2 + 1; }
  std::size_t len() const { return std::size_t(N3 + 2); }
  std::size_t modes() const { return std::size_t(m1()) * std::size_t(m2()); }
  std::size_t mode_index(int n1, int n2) const { return std::size_t((n1 + N1) * m2() + (n2 + N2)); }
  double k1(int n1) const { return alpha1 * n1; }
  double k2(int n2) const { return alpha2 * n2; }
  double ksq(int n1, int n2) const { return k1(n1) * k1(n1) + k2(n2) * k2(n2); }
  bool operator==(const ModeGrid&) const = default;
};

class SpectralField3D {
 public:
  SpectralField3D() = default;
  explicit SpectralField3D(const ModeGrid& g, bool real = true);

  const ModeGrid& grid() const { return g_; }
  bool is_real() const { return real_; }
  void set_real(bool r) { real_ = r; }

  std::span<cplx> mode(int n1, int n2) { return {data_.data() + g_.mode_index(n1, n2) * g_.len(), g_.len()}; }
  std::span<const cplx> mode(int n1, int n2) const {
    return {data_.data() + g_.mode_index(n1, n2) * g_.len(), g_.len()};
  }
  cplx& operator()(int n1, int n2, int n3) { return data_[g_.mode_index(n1, n2) * g_.len() + std::size_t(n3)]; }
  cplx operator()(int n1, int n2, int n3) const { return data_[g_.mode_index(n1, n2) * g_.len() + std::size_t(n3)]; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  // copy the (n2 > 0) or (n2 == 0, n1 > 0) half onto the other half; zero the imaginary part of (0,0)
  void enforce_reality();
  double reality_violation() const;

  // sum over modes and degrees of w_n |u|^2
  double weighted_norm_sq() const;
  double max_abs() const;
  bool all_finite() const;
  void set_zero();

  SpectralField3D& operator+=(const SpectralField3D& o);
  SpectralField3D& operator-=(const SpectralField3D& o);
  SpectralField3D& operator*=(double s);
  void axpy(double a, const SpectralField3D& x);

 private:
  ModeGrid g_;
  bool real_ = true;
  std::vector<cplx> data_;
};

// values at x1 = i L1/P1, x2 = j L2/P2, x3 = cos(pi k/P3); stored [k][i][j]
struct PhysicalField3D {
  int P1 = 0, P2 = 0, P3 = 0;
  std::vector<double> values;

  PhysicalField3D() = default;
  PhysicalField3D(int p1, int p2, int p3) : P1(p1), P2(p2), P3(p3), values(std::size_t(p1) * p2 * (p3 + 1), 0.0) {}
  double& operator()(int i1, int i2, int i3) { return values[(std::size_t(i3) * P1 + i1) * P2 + i2]; }
  double operator()(int i1, int i2, int i3) const { return values[(std::size_t(i3) * P1 + i1) * P2 + i2]; }
};

// smallest n >= lo whose only prime factors are 2, 3, 5, 7
int smooth_size(int lo);

// Dealiased transforms between a ModeGrid and its 3/2-padded physical grid. FFTW plans are made once;
// transform calls allocate their own work arrays and may run concurrently.
class Transformer {
 public:
  explicit Transformer(const ModeGrid& g);
  Transformer(const ModeGrid& g, int P1, int P2, int P3);
  ~Transformer();
  Transformer(const Transformer&) = delete;
  Transformer& operator=(const Transformer&) = delete;

  const ModeGrid& grid() const { return g_; }
  int P1() const { return P1_; }
  int P2() const { return P2_; }
  int P3() const { return P3_; }
  double z(int k) const;

  PhysicalField3D to_physical(const SpectralField3D& u) const;
  SpectralField3D to_spectral(const PhysicalField3D& p) const;
  SpectralField3D pointwise_product(const SpectralField3D& a, const SpectralField3D& b) const;

 private:
  struct Plans;
  ModeGrid g_;
  int P1_, P2_, P3_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace scgk
