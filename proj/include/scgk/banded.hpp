#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace scgk {

// multiply-add counter for cost-scaling checks; nullptr disables counting
struct OpCounter {
  std::uint64_t flops = 0;
  void add(std::uint64_t n) { flops += n; }
};

// LU with partial pivoting for a square matrix with kl sub- and ku super-diagonals.
// Row pivoting widens the upper band to kl+ku.
class BandLU {
 public:
  BandLU() = default;
  BandLU(std::size_t n, int kl, int ku);

  std::size_t size() const { return n_; }
  int kl() const { return kl_; }
  int ku() const { return ku_; }

  // only valid before factorize() and for |i-j| inside the band
  void set(std::size_t i, std::size_t j, double v);
  double get(std::size_t i, std::size_t j) const;

  void factorize(OpCounter* ops = nullptr);
  bool factorized() const { return done_; }
  double min_abs_pivot() const { return min_pivot_; }

  template <class T>
  void solve_inplace(std::span<T> b, OpCounter* ops = nullptr) const;

 private:
  double& at(std::size_t i, std::size_t j) { return ab_[i * width_ + (j + kl_ - i)]; }
  double at(std::size_t i, std::size_t j) const { return ab_[i * width_ + (j + kl_ - i)]; }

  std::size_t n_ = 0;
  int kl_ = 0, ku_ = 0;
  std::size_t width_ = 0;   // columns i-kl .. i+kl+ku
  std::vector<double> ab_;
  std::vector<double> l_;   // multipliers, kl per column
  std::vector<std::size_t> piv_;
  double min_pivot_ = 0;
  bool done_ = false;
};

}  // namespace scgk
