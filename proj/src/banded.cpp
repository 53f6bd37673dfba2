#include "scgk/banded.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace scgk {

BandLU::BandLU(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), width_(std::size_t(2 * kl + ku + 1)), ab_(n * width_, 0.0),
      l_(n * std::size_t(std::max(kl, 0)), 0.0), piv_(n) {
  if (kl < 0 || ku < 0) throw std::invalid_argument("BandLU: negative bandwidth");
}

void BandLU::set(std::size_t i, std::size_t j, double v) {
  if (done_) throw std::logic_error("BandLU::set after factorize");
  if (j + kl_ < i || j > i + ku_) throw std::out_of_range("BandLU::set outside band");
  at(i, j) = v;
}

double BandLU::get(std::size_t i, std::size_t j) const {
  if (j + kl_ < i || j > i + kl_ + ku_) return 0.0;
  return at(i, j);
}

void BandLU::factorize(OpCounter* ops) {
  if (done_) return;
  min_pivot_ = std::numeric_limits<double>::infinity();
  std::uint64_t count = 0;
  for (std::size_t c = 0; c < n_; ++c) {
    const std::size_t last_row = std::min(n_ - 1, c + kl_);
    const std::size_t last_col = std::min(n_ - 1, c + kl_ + ku_);
    std::size_t p = c;
    double best = std::abs(at(c, c));
    for (std::size_t r = c + 1; r <= last_row; ++r)
      if (std::abs(at(r, c)) > best) {
        best = std::abs(at(r, c));
        p = r;
      }
    piv_[c] = p;
    if (best == 0.0) throw std::runtime_error("BandLU: zero pivot in column " + std::to_string(c));
    min_pivot_ = std::min(min_pivot_, best);
    if (p != c)
      for (std::size_t j = c; j <= last_col; ++j) std::swap(at(c, j), at(p, j));
    const double d = at(c, c);
    for (std::size_t r = c + 1; r <= last_row; ++r) {
      const double m = at(r, c) / d;
      l_[c * kl_ + (r - c - 1)] = m;
      at(r, c) = 0.0;
      if (m == 0.0) continue;
      for (std::size_t j = c + 1; j <= last_col; ++j) at(r, j) -= m * at(c, j);
      count += last_col - c;
    }
  }
  if (ops) ops->add(count);
  done_ = true;
}

template <class T>
void BandLU::solve_inplace(std::span<T> b, OpCounter* ops) const {
  if (!done_) throw std::logic_error("BandLU::solve before factorize");
  if (b.size() != n_) throw std::invalid_argument("BandLU::solve size mismatch");
  std::uint64_t count = 0;
  for (std::size_t c = 0; c < n_; ++c) {
    if (piv_[c] != c) std::swap(b[c], b[piv_[c]]);
    const std::size_t last_row = std::min(n_ - 1, c + kl_);
    for (std::size_t r = c + 1; r <= last_row; ++r) b[r] -= l_[c * kl_ + (r - c - 1)] * b[c];
    count += last_row - c;
  }
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t last_col = std::min(n_ - 1, i + kl_ + ku_);
    T s = b[i];
    for (std::size_t j = i + 1; j <= last_col; ++j) s -= at(i, j) * b[j];
    b[i] = s / at(i, i);
    count += last_col - i + 1;
  }
  if (ops) ops->add(count);
}

template void BandLU::solve_inplace<double>(std::span<double>, OpCounter*) const;
template void BandLU::solve_inplace<std::complex<double>>(std::span<std::complex<double>>, OpCounter*) const;

}  // namespace scgk
