#include "scgk/galerkin.hpp"

#include <Eigen/QR>
#include <cmath>

namespace scgk {

namespace {
constexpr double kRankTol = 1e-13;

void check_weights(std::span<const double> w, Index n) {
  if (Index(w.size()) != n) throw std::invalid_argument("weights length does not match the coefficient space");
  for (double x : w)
    if (!(x > 0)) throw std::invalid_argument("weights must be positive");
}
}  // namespace

ConstraintSet::ConstraintSet(Index n) : n_(n), rows_(0, n) { build(); }

ConstraintSet::ConstraintSet(MatrixXd rows) : n_(rows.cols()), rows_(std::move(rows)) { build(); }

ConstraintSet::ConstraintSet(const std::vector<std::vector<double>>& rows)
    : n_(rows.empty() ? 0 : Index(rows.front().size())), rows_(Index(rows.size()), n_) {
  for (Index i = 0; i < rows_.rows(); ++i) {
    if (Index(rows[i].size()) != n_) throw std::invalid_argument("constraint rows have different lengths");
    for (Index j = 0; j < n_; ++j) rows_(i, j) = rows[i][j];
  }
  build();
}

void ConstraintSet::build() {
  const Index K = rows_.rows();
  if (K > n_) throw std::invalid_argument("more constraints than coefficients");
  if (K == 0) {
    null_ = MatrixXd::Identity(n_, n_);
    return;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> rq(rows_.transpose());
  rq.setThreshold(kRankTol);
  if (rq.rank() < K) throw std::invalid_argument("constraint rows are linearly dependent");
  // plain Householder QR of C^T: the trailing n-K columns of Q span null(C)
  Eigen::HouseholderQR<MatrixXd> qr(rows_.transpose());
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n_, n_);
  null_ = Q.rightCols(n_ - K);
}

namespace {
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// boundary rows span many orders of magnitude (j^4 against 1), so the complement and the
// null space are built in extended precision; low coefficients otherwise lose digits
MatL complement_ld(const ConstraintSet& c, std::span<const double> weights) {
  const Index n = c.dim(), K = c.count();
  VecL w(n);
  for (Index j = 0; j < n; ++j) w[j] = weights[j];
  auto wdot = [&](const VecL& a, const VecL& b) { return a.cwiseProduct(w).dot(b); };
  MatL s(n, K);
  for (Index i = 0; i < K; ++i) {
    VecL r(n);
    for (Index j = 0; j < n; ++j) r[j] = (long double)c.rows()(i, j) / w[j];
    const long double r0 = std::sqrt(wdot(r, r));
    for (int pass = 0; pass < 2; ++pass)
      for (Index m = 0; m < i; ++m) r -= wdot(r, s.col(m)) * s.col(m);
    const long double nr = std::sqrt(wdot(r, r));
    if (nr <= kRankTol * r0) throw std::invalid_argument("constraint rows are linearly dependent");
    s.col(i) = r / nr;
  }
  return s;
}

MatL null_basis_ld(const ConstraintSet& c) {
  const Index n = c.dim(), K = c.count();
  Eigen::HouseholderQR<MatL> qr(c.rows().transpose().cast<long double>());
  const MatL Q = qr.householderQ() * MatL::Identity(n, n);
  return Q.rightCols(n - K);
}
}  // namespace

MatrixXd complement_basis(const ConstraintSet& c, std::span<const double> weights) {
  check_weights(weights, c.dim());
  return complement_ld(c, weights).cast<double>();
}

MatrixXd dense_matrix(const LinearOperator& B, Index n) {
  MatrixXd M(n, n);
  VectorXd e = VectorXd::Zero(n);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1;
    VectorXd col = B(e);
    if (col.size() != n) throw std::invalid_argument("operator must map W to W");
    M.col(j) = col;
    e[j] = 0;
  }
  return M;
}

CorrectionBasis::CorrectionBasis(ConstraintSet c, std::vector<double> weights, MatrixXd s, MatrixXd q,
                                 std::string operator_id)
    : c_(std::move(c)), w_(std::move(weights)), s_(std::move(s)), q_(std::move(q)), id_(std::move(operator_id)) {
  ws_ = s_;
  for (Index j = 0; j < ws_.rows(); ++j) ws_.row(j) *= w_[j];
}

namespace {
// restricted operator Phi^T W B Phi and its LU, also in extended precision
struct Restricted {
  MatL Phi, PhiTW;
  Eigen::PartialPivLU<MatL> lu;
};

Restricted restrict_operator(const MatrixXd& B, const ConstraintSet& c, std::span<const double> w,
                             const std::string& id) {
  Restricted r;
  r.Phi = null_basis_ld(c);
  const MatL& Phi = r.Phi;
  r.PhiTW = Phi.transpose();
  for (Index j = 0; j < r.PhiTW.cols(); ++j) r.PhiTW.col(j) *= (long double)w[j];
  const MatL C = r.PhiTW * B.cast<long double>() * Phi;
  if (C.size() == 0) return r;
  r.lu.compute(C);
  const double rc = double(r.lu.rcond());
  if (!(rc > 1e-15))
    throw SingularOperatorError("operator '" + id + "' is singular on the constrained space (rcond " +
                                std::to_string(rc) + ")");
  return r;
}
}  // namespace

CorrectionBasis prepare_correction(const ConstraintSet& c, const MatrixXd& B, std::span<const double> weights,
                                   std::string operator_id) {
  const Index n = c.dim();
  check_weights(weights, n);
  if (B.rows() != n || B.cols() != n) throw std::invalid_argument("operator size does not match constraints");
  const MatL sl = complement_ld(c, weights);
  MatrixXd s = sl.cast<double>();
  MatrixXd q = s;
  if (c.count() > 0 && c.count() < n) {
    Restricted r = restrict_operator(B, c, weights, operator_id);
    const MatL y = r.lu.solve(r.PhiTW * (B.cast<long double>() * sl));
    q = (sl - r.Phi * y).cast<double>();  // q = s - q~
  }
  return CorrectionBasis(c, std::vector<double>(weights.begin(), weights.end()), std::move(s), std::move(q),
                         std::move(operator_id));
}

CorrectionBasis prepare_correction(const ConstraintSet& c, const LinearOperator& B, std::span<const double> weights,
                                   std::string operator_id) {
  return prepare_correction(c, dense_matrix(B, c.dim()), weights, std::move(operator_id));
}

namespace {
template <class V>
V solve_dense(const MatrixXd& B, const ConstraintSet& c, const V& f, std::span<const double> w) {
  const Index n = c.dim();
  check_weights(w, n);
  if (f.size() != n || B.rows() != n || B.cols() != n) throw std::invalid_argument("galerkin_solve_dense: size mismatch");
  if (c.count() == n) return V::Zero(n);
  Restricted r = restrict_operator(B, c, w, "dense");
  const MatL y = r.lu.solve(r.PhiTW * f.template cast<long double>());
  return (r.Phi * y).template cast<typename V::Scalar>();
}
}  // namespace

VectorXd galerkin_solve_dense(const MatrixXd& B, const ConstraintSet& c, const VectorXd& f,
                              std::span<const double> weights) {
  return solve_dense<VectorXd>(B, c, f, weights);
}

Eigen::VectorXcd galerkin_solve_dense(const MatrixXd& B, const ConstraintSet& c, const Eigen::VectorXcd& f,
                                      std::span<const double> weights) {
  VectorXd re = solve_dense<VectorXd>(B, c, f.real(), weights);
  VectorXd im = solve_dense<VectorXd>(B, c, f.imag(), weights);
  return re.cast<cplx>() + cplx(0, 1) * im.cast<cplx>();
}

}  // namespace scgk
