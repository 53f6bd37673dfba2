#include "scgk/solvers_1d.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

namespace scgk {

namespace {

// double antiderivative in coefficient space, rows k >= 2
double q2(Index k, Index j) {
  if (k < 2 || j < 0) return 0.0;
  const double kd = double(k);
  if (j == k - 2) return (k == 2 ? 2.0 : 1.0) / (4.0 * kd * (kd - 1.0));
  if (j == k) return -1.0 / (2.0 * (kd * kd - 1.0));
  if (j == k + 2) return 1.0 / (4.0 * kd * (kd + 1.0));
  return 0.0;
}

double q4(Index k, Index j) {
  double s = 0;
  for (Index l = k - 2; l <= k + 2; l += 2)
    if (l >= 2) s += q2(k, l) * q2(l, j);
  return s;
}

}  // namespace

template <class T>
std::vector<T> ConstCoeffOperator::apply(std::span<const T> v) const {
  std::vector<T> out(v.begin(), v.end());
  for (auto& x : out) x *= c0;
  if (c2 == 0 && c4 == 0) return out;
  std::vector<T> d1(v.size()), d2(v.size());
  cheb::differentiate<T>(v, std::span<T>(d1));
  cheb::differentiate<T>(std::span<const T>(d1), std::span<T>(d2));
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += c2 * d2[i];
  if (c4 != 0) {
    cheb::differentiate<T>(std::span<const T>(d2), std::span<T>(d1));
    cheb::differentiate<T>(std::span<const T>(d1), std::span<T>(d2));
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += c4 * d2[i];
  }
  return out;
}
template std::vector<double> ConstCoeffOperator::apply<double>(std::span<const double>) const;
template std::vector<cplx> ConstCoeffOperator::apply<cplx>(std::span<const cplx>) const;

MatrixXd ConstCoeffOperator::dense(Index n) const {
  MatrixXd M(n, n);
  std::vector<double> e(n, 0.0);
  for (Index j = 0; j < n; ++j) {
    e[j] = 1;
    auto col = apply<double>(e);
    for (Index i = 0; i < n; ++i) M(i, j) = col[i];
    e[j] = 0;
  }
  return M;
}

std::string ConstCoeffOperator::id() const {
  std::ostringstream os;
  os.precision(17);
  os << c0 << "*I + " << c2 << "*D2 + " << c4 << "*D4";
  return os.str();
}

ConstraintSet dirichlet_constraints(std::size_t n) {
  return ConstraintSet(std::vector<std::vector<double>>{cheb::boundary_row(0, 1, n - 1), cheb::boundary_row(0, -1, n - 1)});
}

// ---------------------------------------------------------------------------

double IntegratedMainStep::qp(Index k, Index j) const { return p_ == 2 ? q2(k, j) : q4(k, j); }

double IntegratedMainStep::qb(Index k, Index j) const {
  if (p_ == 2) return (k == j && j >= 2 ? op_.c2 : 0.0) + op_.c0 * q2(k, j);
  return (k == j && j >= 4 ? op_.c4 : 0.0) + (j >= 2 ? op_.c2 * q2(k, j) : 0.0) + op_.c0 * q4(k, j);
}

IntegratedMainStep::IntegratedMainStep(ConstCoeffOperator op, const ConstraintSet& c, std::span<const double> weights,
                                       OpCounter* setup_ops)
    : op_(op), n_(c.dim()), p_(op.order()), K_(c.count()) {
  if (Index(weights.size()) != n_) throw std::invalid_argument("IntegratedMainStep: weights length mismatch");
  if (p_ == 0) {
    if (op_.c0 == 0) throw SingularOperatorError("operator '" + op_.id() + "' is zero");
    return;
  }
  if (n_ < p_) throw std::invalid_argument("IntegratedMainStep: space too small for operator order");
  m_ = n_ - p_;
  const Index b = p_ + K_;

  A_ = BandLU(std::size_t(m_), int(p_), int(p_));
  for (Index i = 0; i < m_; ++i)
    for (Index j = std::max<Index>(0, i - p_); j < std::min(m_, i + p_ + 1); ++j) A_.set(i, j, qb(i + p_, j + p_));
  A_.factorize(setup_ops);

  // Q_p applied to the Riesz representers, rows p..n+p-1
  MatrixXd QR = MatrixXd::Zero(n_, K_);
  for (Index s = 0; s < K_; ++s)
    for (Index k = p_; k < n_ + p_; ++k) {
      double acc = 0;
      for (Index j = std::max<Index>(0, k - p_); j < std::min(n_, k + p_ + 1); ++j)
        acc += qp(k, j) * c.rows()(s, j) / weights[j];
      QR(k - p_, s) = acc;
    }

  E_ = MatrixXd::Zero(m_, b);
  for (Index i = 0; i < m_; ++i) {
    for (Index t = 0; t < p_; ++t) E_(i, t) = qb(i + p_, t);
    for (Index s = 0; s < K_; ++s) E_(i, p_ + s) = -QR(i, s);
  }
  F_ = MatrixXd::Zero(b, m_);
  MatrixXd G = MatrixXd::Zero(b, b);
  for (Index t = 0; t < p_; ++t) {
    const Index k = n_ + t;
    for (Index j = std::max<Index>(0, k - 2 * p_); j < m_; ++j) F_(t, j) = qb(k, j + p_);
    for (Index u = 0; u < p_; ++u) G(t, u) = qb(k, u);
    for (Index s = 0; s < K_; ++s) G(t, p_ + s) = -QR(k - p_, s);
  }
  for (Index r = 0; r < K_; ++r) {
    const Index row = p_ + r;
    if (r < std::min(K_, p_)) {
      G(row, r) = 1.0;
    } else {
      for (Index j = 0; j < m_; ++j) F_(row, j) = c.rows()(r, j + p_);
      for (Index u = 0; u < p_; ++u) G(row, u) = c.rows()(r, u);
    }
  }

  Z_ = E_;
  for (Index t = 0; t < b; ++t) A_.solve_inplace<double>(std::span<double>(Z_.col(t).data(), m_), setup_ops);
  MatrixXd S = G - F_ * Z_;
  Eigen::FullPivLU<MatrixXd> lu(S);
  if (!lu.isInvertible() || lu.rcond() < 1e-15)
    throw SingularOperatorError("operator '" + op_.id() + "': border system of the main step is singular");
  Sinv_ = lu.inverse();
  if (setup_ops) setup_ops->add(std::uint64_t(b * b * m_ + n_ * K_ * (2 * p_ + 1)));
}

template <class T>
void IntegratedMainStep::solve(std::span<const T> f, std::span<T> w, OpCounter* ops) const {
  if (Index(f.size()) != n_ || Index(w.size()) != n_) throw std::invalid_argument("IntegratedMainStep: size mismatch");
  if (p_ == 0) {
    for (Index j = 0; j < n_; ++j) w[j] = f[j] / op_.c0;
    if (ops) ops->add(std::uint64_t(n_));
    return;
  }
  const Index b = p_ + K_;
  std::vector<T> g(std::size_t(n_), T{});
  for (Index k = p_; k < n_ + p_; ++k) {
    T acc{};
    for (Index j = std::max<Index>(0, k - p_); j < std::min(n_, k + p_ + 1); ++j) acc += qp(k, j) * f[j];
    g[k - p_] = acc;
  }
  std::span<T> u(g.data(), std::size_t(m_));
  A_.solve_inplace<T>(u, ops);
  std::vector<T> rhs(std::size_t(b), T{});
  for (Index t = 0; t < p_; ++t) rhs[t] = g[m_ + t];
  for (Index r = 0; r < b; ++r) {
    T acc{};
    for (Index j = 0; j < m_; ++j) acc += F_(r, j) * u[j];
    rhs[r] -= acc;
  }
  std::vector<T> y(std::size_t(b), T{});
  for (Index r = 0; r < b; ++r)
    for (Index s = 0; s < b; ++s) y[r] += Sinv_(r, s) * rhs[s];
  for (Index t = 0; t < p_; ++t) w[t] = y[t];
  for (Index j = 0; j < m_; ++j) {
    T acc = u[j];
    for (Index s = 0; s < b; ++s) acc -= Z_(j, s) * y[s];
    w[j + p_] = acc;
  }
  if (ops) ops->add(std::uint64_t(n_ * (2 * p_ + 1) + 2 * b * m_ + b * b));
}
template void IntegratedMainStep::solve<double>(std::span<const double>, std::span<double>, OpCounter*) const;
template void IntegratedMainStep::solve<cplx>(std::span<const cplx>, std::span<cplx>, OpCounter*) const;

// ---------------------------------------------------------------------------

namespace {

// main step, correction, then one refinement pass on the full residual f - Bv
template <class T>
void corrected_solve(const ConstCoeffOperator& op, const IntegratedMainStep& ms, const CorrectionBasis& cb,
                     std::span<const T> f, std::span<T> v, OpCounter* ops) {
  const std::size_t n = f.size();
  ms.solve<T>(f, v, ops);
  cb.correct_inplace<T>(v);
  std::vector<T> r = op.apply<T>(std::span<const T>(v.data(), n)), d(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = f[i] - r[i];
  ms.solve<T>(std::span<const T>(r), std::span<T>(d), ops);
  cb.correct_inplace<T>(std::span<T>(d));
  for (std::size_t i = 0; i < n; ++i) v[i] += d[i];
  if (ops) ops->add(std::uint64_t(n * (4 * cb.count() + 4 * op.order() + 3)));
}

}  // namespace

template <class T>
std::vector<T> helmholtz_recursion(double alpha, double beta, std::span<const T> f, OpCounter* ops) {
  if (alpha == 0) throw std::invalid_argument("helmholtz_recursion: alpha = 0, use galerkin_solve_dense instead");
  const std::size_t n = f.size();
  std::vector<T> w(n, T{}), rhs(f.begin(), f.end()), carry(n, T{});
  std::uint64_t count = 0;
  // even and odd degrees never mix
  for (long parity = 0; parity < 2; ++parity) {
    long top = long(n) - 1;
    if ((top - parity) % 2 != 0) --top;
    for (long m = top; m >= parity; m -= 2) {
      w[m] = rhs[m] / alpha;
      // left side holds d * T''_m; rewrite T''_m by the three-term relation
      const T d = beta * w[m] + carry[m];
      const double md = double(m);
      if (m >= 3) rhs[m - 2] -= 4.0 * (md - 1.0) * md * d;
      else if (m == 2) rhs[0] -= 4.0 * d;
      if (m >= 4) carry[m - 2] += 2.0 * md / (md - 3.0) * d;
      if (m >= 5) carry[m - 4] -= (md - 1.0) * md / ((md - 3.0) * (md - 4.0)) * d;
      count += 5;
    }
  }
  if (ops) ops->add(count);
  return w;
}
template std::vector<double> helmholtz_recursion<double>(double, double, std::span<const double>, OpCounter*);
template std::vector<cplx> helmholtz_recursion<cplx>(double, double, std::span<const cplx>, OpCounter*);

template <class T>
ChebSeries<T> project_dirichlet(const ChebSeries<T>& f, std::size_t N) {
  const std::size_t n = N + 2;
  thread_local std::map<std::size_t, std::shared_ptr<const CorrectionBasis>> cache;
  auto& cb = cache[n];
  if (!cb) {
    auto w = cheb::weights(n);
    cb = std::make_shared<const CorrectionBasis>(
        prepare_correction(dirichlet_constraints(n), MatrixXd(MatrixXd::Identity(Index(n), Index(n))), w, "identity"));
  }
  return cb->correct(f.resized(n));
}
template ChebSeries<double> project_dirichlet<double>(const ChebSeries<double>&, std::size_t);
template ChebSeries<cplx> project_dirichlet<cplx>(const ChebSeries<cplx>&, std::size_t);

ChebSeries<double> solve_helmholtz(const HelmholtzProblem& p, const CorrectionBasis& cb, MainStep main,
                                   OpCounter* ops) {
  if (p.alpha == 0) throw std::invalid_argument("solve_helmholtz: alpha = 0, use galerkin_solve_dense instead");
  const std::size_t n = p.N + 2;
  if (std::size_t(cb.dim()) != n) throw std::invalid_argument("solve_helmholtz: correction basis has wrong size");
  ChebSeries<double> f = p.f.resized(n);
  ChebSeries<double> w(n);
  if (main == MainStep::kRecursion) {
    w = ChebSeries<double>(helmholtz_recursion<double>(p.alpha, p.beta, f.span(), ops));
  } else {
    const ConstCoeffOperator op{p.alpha, p.beta, 0.0};
    IntegratedMainStep ms(op, cb.constraints(), cb.weights(), ops);
    corrected_solve<double>(op, ms, cb, f.span(), std::span<double>(w.coeffs()), ops);
    return w;
  }
  cb.correct_inplace<double>(std::span<double>(w.coeffs()));
  if (ops) ops->add(std::uint64_t(2 * n * cb.count()));
  return w;
}

ChebSeries<double> solve_fourth_order(double c0, double c2, double c4, const ChebSeries<double>& f,
                                      const ConstraintSet& constraints, const CorrectionBasis& cb, OpCounter* ops) {
  const std::size_t n = std::size_t(constraints.dim());
  if (cb.dim() != constraints.dim()) throw std::invalid_argument("solve_fourth_order: correction basis has wrong size");
  ChebSeries<double> fw = f.resized(n), w(n);
  const ConstCoeffOperator op{c0, c2, c4};
  IntegratedMainStep ms(op, constraints, cb.weights(), ops);
  corrected_solve<double>(op, ms, cb, fw.span(), std::span<double>(w.coeffs()), ops);
  return w;
}

// ---------------------------------------------------------------------------

ConstrainedSolver::ConstrainedSolver(ConstCoeffOperator op, const ConstraintSet& c, std::string id)
    : op_(op),
      cb_(prepare_correction(c, op.dense(c.dim()), cheb::weights(std::size_t(c.dim())), id.empty() ? op.id() : id)),
      main_(op, c, cb_.weights()) {}

ConstrainedSolver::ConstrainedSolver(ConstCoeffOperator op, const ConstraintSet& c, std::span<const double> weights,
                                     std::string id)
    : op_(op),
      cb_(prepare_correction(c, op.dense(c.dim()), weights, id.empty() ? op.id() : id)),
      main_(op, c, cb_.weights()) {}

template <class T>
void ConstrainedSolver::solve_inplace(std::span<T> rhs, OpCounter* ops) const {
  std::vector<T> f(rhs.begin(), rhs.end());
  corrected_solve<T>(op_, main_, cb_, std::span<const T>(f), rhs, ops);
}
template void ConstrainedSolver::solve_inplace<double>(std::span<double>, OpCounter*) const;
template void ConstrainedSolver::solve_inplace<cplx>(std::span<cplx>, OpCounter*) const;

}  // namespace scgk
