#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "scgk/banded.hpp"
#include "scgk/chebyshev.hpp"
#include "scgk/galerkin.hpp"

namespace scgk {

// c0 v + c2 v'' + c4 v'''' on W = span(T_0..T_{n-1})
struct ConstCoeffOperator {
  double c0 = 0, c2 = 0, c4 = 0;

  int order() const { return c4 != 0 ? 4 : (c2 != 0 ? 2 : 0); }
  template <class T>
  std::vector<T> apply(std::span<const T> v) const;
  MatrixXd dense(Index n) const;
  std::string id() const;
};

struct HelmholtzProblem {
  double alpha = 1, beta = 0;
  ChebSeries<double> f;
  std::size_t N = 0;  // W = span(T_0..T_{N+1})
};

enum class MainStep { kIntegrated, kRecursion };

// Dirichlet pair v(+1) = v(-1) = 0 on n coefficients
ConstraintSet dirichlet_constraints(std::size_t n);

// Main step in W: finds w with P_V(Bw - f) = 0 by solving Bw = P_W f + sum_i g_i r_i
// in double-integrated form. The free K-dimensional family is pinned by zeroing the
// lowest min(K,p) coefficients and, if K > p, by the trailing K-p constraint rows.
// Banded block plus a (p+K)-sized border; O(n) per solve.
class IntegratedMainStep {
 public:
  IntegratedMainStep(ConstCoeffOperator op, const ConstraintSet& c, std::span<const double> weights,
                     OpCounter* setup_ops = nullptr);

  Index dim() const { return n_; }
  template <class T>
  void solve(std::span<const T> f, std::span<T> w, OpCounter* ops = nullptr) const;

 private:
  double qb(Index k, Index j) const;  // (Q_p B)_{k,j}
  double qp(Index k, Index j) const;  // (Q_p)_{k,j}

  ConstCoeffOperator op_;
  Index n_ = 0, p_ = 0, K_ = 0, m_ = 0;
  BandLU A_;
  MatrixXd E_;     // band rows x border
  MatrixXd F_;     // border rows x band columns
  MatrixXd Z_;     // A^{-1} E
  MatrixXd Sinv_;  // inverse Schur complement
};

// backward two-stride recursion for alpha v + beta v'' = f, exact in W
template <class T>
std::vector<T> helmholtz_recursion(double alpha, double beta, std::span<const T> f, OpCounter* ops = nullptr);

template <class T>
ChebSeries<T> project_dirichlet(const ChebSeries<T>& f, std::size_t N);

ChebSeries<double> solve_helmholtz(const HelmholtzProblem& p, const CorrectionBasis& cb,
                                   MainStep main = MainStep::kIntegrated, OpCounter* ops = nullptr);

ChebSeries<double> solve_fourth_order(double c0, double c2, double c4, const ChebSeries<double>& f,
                                      const ConstraintSet& constraints, const CorrectionBasis& cb,
                                      OpCounter* ops = nullptr);

// operator + constraints with everything factorized once; used per Fourier mode
class ConstrainedSolver {
 public:
  ConstrainedSolver(ConstCoeffOperator op, const ConstraintSet& c, std::string id = {});
  ConstrainedSolver(ConstCoeffOperator op, const ConstraintSet& c, std::span<const double> weights, std::string id = {});

  const CorrectionBasis& basis() const { return cb_; }
  const ConstCoeffOperator& op() const { return op_; }
  Index dim() const { return cb_.dim(); }

  // rhs (length dim) replaced by the V solution
  template <class T>
  void solve_inplace(std::span<T> rhs, OpCounter* ops = nullptr) const;
  template <class T>
  ChebSeries<T> solve(const ChebSeries<T>& f) const {
    ChebSeries<T> v = f.resized(std::size_t(dim()));
    solve_inplace<T>(std::span<T>(v.coeffs()));
    return v;
  }

 private:
  ConstCoeffOperator op_;
  CorrectionBasis cb_;
  IntegratedMainStep main_;
};

}  // namespace scgk
