#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace scgk {

using cplx = std::complex<double>;

namespace detail {
inline double conj_if(double x) { return x; }
inline cplx conj_if(cplx x) { return std::conj(x); }
}  // namespace detail

// Coefficients a_0..a_M of sum a_k T_k(x) on [-1,1]. Always at least one entry.
template <class T>
class ChebSeries {
 public:
  using value_type = T;

  ChebSeries() : c_(1, T{}) {}
  explicit ChebSeries(std::size_t n) : c_(std::max<std::size_t>(n, 1), T{}) {}
  ChebSeries(std::initializer_list<T> il) : c_(il) {
    if (c_.empty()) c_.push_back(T{});
  }
  explicit ChebSeries(std::vector<T> c) : c_(std::move(c)) {
    if (c_.empty()) throw std::invalid_argument("ChebSeries needs at least one coefficient");
  }
  template <class U>
  explicit ChebSeries(std::span<const U> c) : c_(c.begin(), c.end()) {
    if (c_.empty()) throw std::invalid_argument("ChebSeries needs at least one coefficient");
  }

  // T_k padded to n coefficients
  static ChebSeries basis(std::size_t k, std::size_t n) {
    ChebSeries s(std::max(n, k + 1));
    s.c_[k] = T(1);
    return s;
  }

  std::size_t size() const { return c_.size(); }
  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T coeff(std::size_t i) const { return i < c_.size() ? c_[i] : T{}; }
  std::vector<T>& coeffs() { return c_; }
  const std::vector<T>& coeffs() const { return c_; }
  std::span<const T> span() const { return c_; }

  // truncate or zero-pad
  ChebSeries resized(std::size_t n) const {
    std::vector<T> out(std::max<std::size_t>(n, 1), T{});
    std::copy_n(c_.begin(), std::min(out.size(), c_.size()), out.begin());
    return ChebSeries(std::move(out));
  }

  ChebSeries& operator+=(const ChebSeries& o) {
    if (o.size() > size()) c_.resize(o.size(), T{});
    for (std::size_t i = 0; i < o.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  ChebSeries& operator-=(const ChebSeries& o) {
    if (o.size() > size()) c_.resize(o.size(), T{});
    for (std::size_t i = 0; i < o.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  ChebSeries& operator*=(T s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  friend ChebSeries operator+(ChebSeries a, const ChebSeries& b) { return a += b; }
  friend ChebSeries operator-(ChebSeries a, const ChebSeries& b) { return a -= b; }
  friend ChebSeries operator*(T s, ChebSeries a) { return a *= s; }

 private:
  std::vector<T> c_;
};

namespace cheb {

inline double weight(std::size_t k) { return k == 0 ? std::numbers::pi / 2 : std::numbers::pi; }
std::vector<double> weights(std::size_t n);

// kHalvedT0 is (pi/2, pi, pi, ...) as used by weight(); kChebyshevIntegral is the exact
// integral of T_k^2 / sqrt(1 - x^2), (pi, pi/2, pi/2, ...)
enum class WeightConvention { kHalvedT0, kChebyshevIntegral };
std::vector<double> weights(std::size_t n, WeightConvention c);

// sum_k w_k a_k conj(b_k); the shorter input is zero padded
template <class T>
T inner_product(std::span<const T> a, std::span<const T> b) {
  T s{};
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) s += weight(k) * a[k] * detail::conj_if(b[k]);
  return s;
}
template <class T>
T inner_product(const ChebSeries<T>& a, const ChebSeries<T>& b) {
  return inner_product<T>(a.span(), b.span());
}

// derivative coefficients, same length as the input (top entry is zero)
template <class T>
void differentiate(std::span<const T> a, std::span<T> out) {
  const std::size_t n = a.size();
  if (out.size() != n) throw std::invalid_argument("differentiate: output length mismatch");
  if (n == 1) {
    out[0] = T{};
    return;
  }
  T b2{}, b1{};  // b_{k+2}, b_{k+1}
  out[n - 1] = T{};
  for (std::size_t k = n - 1; k-- > 0;) {
    T bk = b2 + 2.0 * double(k + 1) * a[k + 1];
    out[k] = bk;
    b2 = b1;
    b1 = bk;
  }
  out[0] *= 0.5;
}
template <class T>
ChebSeries<T> differentiate(const ChebSeries<T>& a) {
  ChebSeries<T> d(a.size());
  differentiate<T>(a.span(), std::span<T>(d.coeffs()));
  return d;
}

// Clenshaw
template <class T>
T eval_at(std::span<const T> a, double x) {
  if (!(std::abs(x) <= 1.0)) throw std::domain_error("eval_at: |x| > 1");
  T b1{}, b2{};
  for (std::size_t k = a.size(); k-- > 1;) {
    T bk = a[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = bk;
  }
  return a[0] + x * b1 - b2;
}
template <class T>
T eval_at(const ChebSeries<T>& a, double x) {
  return eval_at<T>(a.span(), x);
}

// T_j^{(order)}(endpoint) for j = 0..M
std::vector<double> boundary_row(int order, int endpoint, std::size_t M);

struct ExpansionTerm {
  std::size_t index;
  double coeff;
};
// 2 T_k = sum coeff * T''_index, k >= 3
std::array<ExpansionTerm, 3> second_derivative_expansion(std::size_t k);

}  // namespace cheb
}  // namespace scgk
