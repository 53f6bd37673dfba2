#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scgk/chebyshev.hpp"

namespace scgk {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

class SingularOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// K independent linear functionals on an n-dimensional coefficient space.
class ConstraintSet {
 public:
  explicit ConstraintSet(Index n);  // no constraints
  explicit ConstraintSet(MatrixXd rows);
  ConstraintSet(const std::vector<std::vector<double>>& rows);

  Index count() const { return rows_.rows(); }
  Index dim() const { return n_; }
  const MatrixXd& rows() const { return rows_; }
  // n x (n-K), Euclidean-orthonormal, C * null_basis() = 0
  const MatrixXd& null_basis() const { return null_; }

  // max_i |c_i . v| / (|c_i| |v|)
  template <class T>
  double relative_violation(std::span<const T> v) const {
    if (Index(v.size()) != n_) throw std::invalid_argument("relative_violation: dimension mismatch");
    double vn = 0;
    for (const auto& x : v) vn += std::norm(x);
    vn = std::sqrt(vn);
    if (vn == 0) return 0;
    double worst = 0;
    for (Index i = 0; i < count(); ++i) {
      T s{};
      for (Index j = 0; j < n_; ++j) s += rows_(i, j) * v[j];
      worst = std::max(worst, std::abs(s) / (rows_.row(i).norm() * vn));
    }
    return worst;
  }

 private:
  void build();
  Index n_;
  MatrixXd rows_;
  MatrixXd null_;
};

// weighted inner product on coefficient vectors, weights w_j
template <class T>
T weighted_dot(std::span<const double> w, const Vec<T>& a, const Vec<T>& b) {
  T s{};
  for (Index j = 0; j < a.size(); ++j) s += w[j] * a[j] * detail::conj_if(b[j]);
  return s;
}

// orthonormal basis of the weighted complement of V = null(C), columns s_1..s_K
MatrixXd complement_basis(const ConstraintSet& c, std::span<const double> weights);

using LinearOperator = std::function<VectorXd(const VectorXd&)>;
MatrixXd dense_matrix(const LinearOperator& B, Index n);

class CorrectionBasis {
 public:
  CorrectionBasis(ConstraintSet c, std::vector<double> weights, MatrixXd s, MatrixXd q, std::string operator_id);

  const ConstraintSet& constraints() const { return c_; }
  const std::vector<double>& weights() const { return w_; }
  const MatrixXd& s() const { return s_; }
  const MatrixXd& q() const { return q_; }
  MatrixXd q_tilde() const { return s_ - q_; }
  const std::string& operator_id() const { return id_; }
  Index dim() const { return s_.rows(); }
  Index count() const { return s_.cols(); }

  // v = w - sum_i (w, s_i) q_i, in place
  template <class T>
  void correct_inplace(std::span<T> w) const {
    if (Index(w.size()) != dim())
      throw std::invalid_argument("correct: expected " + std::to_string(dim()) + " coefficients, got " +
                                  std::to_string(w.size()));
    const Index n = dim();
    for (Index i = 0; i < count(); ++i) {
      T b{};
      for (Index j = 0; j < n; ++j) b += ws_(j, i) * w[j];
      for (Index j = 0; j < n; ++j) w[j] -= b * q_(j, i);
    }
  }
  template <class T>
  Vec<T> correct(Vec<T> w) const {
    correct_inplace<T>(std::span<T>(w.data(), w.size()));
    return w;
  }
  template <class T>
  ChebSeries<T> correct(const ChebSeries<T>& w) const {
    ChebSeries<T> v = w;
    correct_inplace<T>(std::span<T>(v.coeffs()));
    return v;
  }

 private:
  ConstraintSet c_;
  std::vector<double> w_;
  MatrixXd s_, q_;
  MatrixXd ws_;  // weights .* s, so (w, s_i) = ws_i . w
  std::string id_;
};

CorrectionBasis prepare_correction(const ConstraintSet& c, const MatrixXd& B, std::span<const double> weights,
                                   std::string operator_id);
CorrectionBasis prepare_correction(const ConstraintSet& c, const LinearOperator& B, std::span<const double> weights,
                                   std::string operator_id);

// traditional Galerkin on a basis of V: find v in V with P_V(Bv - f) = 0
VectorXd galerkin_solve_dense(const MatrixXd& B, const ConstraintSet& c, const VectorXd& f,
                              std::span<const double> weights);
Eigen::VectorXcd galerkin_solve_dense(const MatrixXd& B, const ConstraintSet& c, const Eigen::VectorXcd& f,
                                      std::span<const double> weights);

}  // namespace scgk
