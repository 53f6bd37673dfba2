#include "doctest.h"
#include "oracles.hpp"
#include "scgk/solvers_1d.hpp"

using namespace scgk;
using doctest::Approx;

namespace {

Eigen::VectorXd vec(const ChebSeries<double>& s) { return Eigen::Map<const Eigen::VectorXd>(s.coeffs().data(), Index(s.size())); }

MatrixXd helmholtz_matrix(double a, double b, Index n) {
  MatrixXd D = oracle::derivative_matrix(n);
  return a * MatrixXd::Identity(n, n) + b * D * D;
}

MatrixXd fourth_matrix(double c0, double c2, double c4, Index n) {
  MatrixXd D = oracle::derivative_matrix(n);
  MatrixXd D2 = D * D;
  return c0 * MatrixXd::Identity(n, n) + c2 * D2 + c4 * D2 * D2;
}

ConstraintSet clamped(std::size_t n) {
  return ConstraintSet(std::vector<std::vector<double>>{cheb::boundary_row(0, 1, n - 1), cheb::boundary_row(0, -1, n - 1),
                        cheb::boundary_row(1, 1, n - 1), cheb::boundary_row(1, -1, n - 1)});
}

ChebSeries<double> random_series(std::mt19937_64& rng, std::size_t n) {
  auto v = oracle::random_vector(rng, Index(n));
  return ChebSeries<double>(std::vector<double>(v.data(), v.data() + n));
}

}  // namespace

TEST_CASE("project_dirichlet") {
  ChebSeries<double> f{-1, 0, 1};
  auto v = project_dirichlet(f, 4);
  CHECK(v.size() == 6);
  CHECK(v[0] == Approx(-1));
  CHECK(v[2] == Approx(1));
  CHECK(std::abs(v[4]) < 1e-15);
  auto z = project_dirichlet(ChebSeries<double>{0.0}, 4);
  for (auto x : z.coeffs()) CHECK(x == 0.0);
  auto t0 = project_dirichlet(ChebSeries<double>{1.0}, 4);
  std::vector<double> ref{0.5, 0, -0.25, 0, -0.25, 0};
  for (int i = 0; i < 6; ++i) CHECK(std::abs(t0[i] - ref[i]) < 1e-15);
  CHECK(std::abs(cheb::eval_at(t0, 1.0)) < 1e-15);
  CHECK(std::abs(cheb::eval_at(t0, -1.0)) < 1e-15);
}

TEST_CASE("project_dirichlet equals the weighted orthogonal projection") {
  std::mt19937_64 rng(1);
  const std::size_t N = 14, n = N + 2;
  auto f = random_series(rng, 25);
  auto v = project_dirichlet(f, N);
  // orthogonal projection of the truncated series onto V
  Eigen::VectorXd ref = oracle::galerkin(MatrixXd(MatrixXd::Identity(Index(n), Index(n))),
                                         dirichlet_constraints(n).rows(), vec(f.resized(n)));
  CHECK((vec(v) - ref).norm() < 1e-14);
}

TEST_CASE("helmholtz recursion: manufactured example and exactness in W") {
  std::vector<double> f{3, 0, 1, 0};
  auto w = helmholtz_recursion<double>(1.0, 1.0, f);
  CHECK(w[0] == Approx(-1));
  CHECK(w[1] == 0.0);
  CHECK(w[2] == Approx(1));
  CHECK(w[3] == 0.0);
  // B w = f exactly in W for a benign ratio
  std::mt19937_64 rng(4);
  for (Index n : {6, 11, 18}) {
    auto rf = oracle::random_vector(rng, n);
    std::vector<double> fv(rf.data(), rf.data() + n);
    auto sol = helmholtz_recursion<double>(1.3, -1e-3, fv);
    Eigen::VectorXd ws = Eigen::Map<Eigen::VectorXd>(sol.data(), n);
    CHECK((helmholtz_matrix(1.3, -1e-3, n) * ws - rf).norm() < 1e-12 * rf.norm());
  }
  CHECK_THROWS_AS(helmholtz_recursion<double>(0.0, 1.0, f), std::invalid_argument);
}

TEST_CASE("solve_helmholtz examples") {
  const std::size_t N = 2, n = 4;
  auto w = cheb::weights(n);
  auto cb = prepare_correction(dirichlet_constraints(n), helmholtz_matrix(1, 1, n), w, "I + D2");
  HelmholtzProblem p{1.0, 1.0, ChebSeries<double>{3, 0, 1}, N};
  for (auto ms : {MainStep::kIntegrated, MainStep::kRecursion}) {
    auto v = solve_helmholtz(p, cb, ms);
    CHECK(v[0] == Approx(-1));
    CHECK(std::abs(v[1]) < 1e-15);
    CHECK(v[2] == Approx(1));
    CHECK(std::abs(v[3]) < 1e-15);
  }
  // beta = 0 reduces to the projection
  std::mt19937_64 rng(2);
  const std::size_t N2 = 12;
  auto cb0 = prepare_correction(dirichlet_constraints(N2 + 2), helmholtz_matrix(1, 0, N2 + 2),
                                cheb::weights(N2 + 2), "I");
  auto f = random_series(rng, 20);
  auto v0 = solve_helmholtz(HelmholtzProblem{1.0, 0.0, f, N2}, cb0);
  CHECK((vec(v0) - vec(project_dirichlet(f, N2))).norm() < 1e-14);
  CHECK_THROWS_AS(solve_helmholtz(HelmholtzProblem{0.0, 1.0, f, N2}, cb0), std::invalid_argument);
}

TEST_CASE("solve_helmholtz matches the dense oracle, N = 16, beta/alpha = -0.3") {
  std::mt19937_64 rng(17);
  const std::size_t N = 16, n = N + 2;
  auto cb = prepare_correction(dirichlet_constraints(n), helmholtz_matrix(1, -0.3, n), cheb::weights(n), "helm");
  for (int t = 0; t < 10; ++t) {
    auto f = random_series(rng, 18);
    auto v = solve_helmholtz(HelmholtzProblem{1.0, -0.3, f, N}, cb);
    Eigen::VectorXd ref = oracle::galerkin(helmholtz_matrix(1, -0.3, n), dirichlet_constraints(n).rows(), vec(f));
    CHECK(oracle::wnorm(Eigen::VectorXd(vec(v) - ref)) <= 1e-11 * oracle::wnorm(ref));
    CHECK(std::abs(cheb::eval_at(v, 1.0)) < 1e-12 * oracle::wnorm(ref));
    CHECK(std::abs(cheb::eval_at(v, -1.0)) < 1e-12 * oracle::wnorm(ref));
  }
}

TEST_CASE("two different W solutions correct to the same v") {
  std::mt19937_64 rng(23);
  const std::size_t N = 12, n = N + 2;
  const double a = 2.0, b = -1e-4;  // benign ratio, the recursion is accurate here
  auto cb = prepare_correction(dirichlet_constraints(n), helmholtz_matrix(a, b, n), cheb::weights(n), "helm");
  auto f = random_series(rng, n);
  auto v1 = solve_helmholtz(HelmholtzProblem{a, b, f, N}, cb, MainStep::kIntegrated);
  auto v2 = solve_helmholtz(HelmholtzProblem{a, b, f, N}, cb, MainStep::kRecursion);
  CHECK((vec(v1) - vec(v2)).norm() < 1e-12 * vec(v1).norm());
  // the W solutions themselves differ
  std::vector<double> fv(f.coeffs());
  auto wr = helmholtz_recursion<double>(a, b, fv);
  IntegratedMainStep ms({a, b, 0}, dirichlet_constraints(n), cheb::weights(n));
  std::vector<double> wi(n);
  ms.solve<double>(fv, wi);
  double diff = 0;
  for (std::size_t i = 0; i < n; ++i) diff += std::abs(wr[i] - wi[i]);
  CHECK(diff > 1e-6);
}

TEST_CASE("main step operation counts grow linearly") {
  std::mt19937_64 rng(5);
  std::vector<double> counts;
  for (std::size_t N : {16, 32, 64, 128}) {
    const std::size_t n = N + 2;
    auto cb = prepare_correction(dirichlet_constraints(n), helmholtz_matrix(1, -0.5, n), cheb::weights(n), "h");
    OpCounter ops;
    solve_helmholtz(HelmholtzProblem{1.0, -0.5, random_series(rng, n), N}, cb, MainStep::kIntegrated, &ops);
    counts.push_back(double(ops.flops));
    OpCounter rops;
    solve_helmholtz(HelmholtzProblem{1.0, -0.5, random_series(rng, n), N}, cb, MainStep::kRecursion, &rops);
    CHECK(rops.flops > 0);
  }
  for (std::size_t i = 1; i < counts.size(); ++i) {
    CHECK(counts[i] / counts[i - 1] < 2.2);
    CHECK(counts[i] / counts[i - 1] > 1.5);
  }
}

TEST_CASE("solve_fourth_order reduces to solve_helmholtz when c4 = 0") {
  std::mt19937_64 rng(8);
  const std::size_t N = 16, n = N + 2;
  ConstraintSet c = dirichlet_constraints(n);
  auto cb = prepare_correction(c, helmholtz_matrix(1.5, -0.7, n), cheb::weights(n), "h");
  auto f = random_series(rng, n);
  auto v1 = solve_fourth_order(1.5, -0.7, 0.0, f, c, cb);
  auto v2 = solve_helmholtz(HelmholtzProblem{1.5, -0.7, f, N}, cb);
  CHECK((vec(v1) - vec(v2)).norm() <= 1e-11 * vec(v2).norm());
}

TEST_CASE("solve_fourth_order: clamped manufactured solution") {
  // v* = 3T0 - 4T2 + T4 has v(+-1) = v'(+-1) = 0
  const std::size_t n = 10;
  std::vector<oracle::Rational> vs{3, 0, -4, 0, 1};
  oracle::Poly pv = oracle::from_cheb(vs);
  const double c0 = 2.0, c2 = -1.5, c4 = 0.25;
  oracle::Poly pf = oracle::add(oracle::Poly{0}, pv, oracle::Rational(2));
  pf = oracle::add(pf, oracle::deriv(oracle::deriv(pv)), oracle::Rational(-3, 2));
  pf = oracle::add(pf, oracle::deriv(oracle::deriv(oracle::deriv(oracle::deriv(pv)))), oracle::Rational(1, 4));
  auto fc = oracle::to_cheb(pf);
  ChebSeries<double> f(n);
  for (std::size_t i = 0; i < fc.size(); ++i) f[i] = static_cast<double>(fc[i]);
  ConstraintSet c = clamped(n);
  auto cb = prepare_correction(c, fourth_matrix(c0, c2, c4, n), cheb::weights(n), "clamped");
  auto v = solve_fourth_order(c0, c2, c4, f, c, cb);
  std::vector<double> want{3, 0, -4, 0, 1, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(v[i] - want[i]) < 1e-12);
}

TEST_CASE("solve_fourth_order matches the dense oracle, N = 16") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const std::size_t N = 16, n = N + 2;
  ConstraintSet c = clamped(n);
  for (int t = 0; t < 10; ++t) {
    const double c0 = u(rng), c2 = -u(rng), c4 = u(rng) * 0.1;
    MatrixXd B = fourth_matrix(c0, c2, c4, n);
    auto cb = prepare_correction(c, B, cheb::weights(n), "4th");
    auto f = random_series(rng, n);
    auto v = solve_fourth_order(c0, c2, c4, f, c, cb);
    Eigen::VectorXd ref = oracle::galerkin(B, c.rows(), vec(f));
    CHECK(oracle::wnorm(Eigen::VectorXd(vec(v) - ref)) <= 1e-10 * oracle::wnorm(ref));
    CHECK(c.relative_violation<double>(v.span()) < 1e-11);
  }
}

TEST_CASE("ConstrainedSolver on complex data and second-order operators with four constraints") {
  std::mt19937_64 rng(12);
  const std::size_t n = 20;
  ConstraintSet c = clamped(n);
  ConstCoeffOperator op{3.0, -1.0, 0.0};
  ConstrainedSolver s(op, c);
  Eigen::VectorXcd f = oracle::random_vector(rng, n).cast<cplx>() + cplx(0, 1) * oracle::random_vector(rng, n).cast<cplx>();
  ChebSeries<cplx> fs(std::vector<cplx>(f.data(), f.data() + n));
  auto v = s.solve(fs);
  Eigen::VectorXcd ref = oracle::galerkin(fourth_matrix(3.0, -1.0, 0.0, n), c.rows(), f);
  Eigen::VectorXcd got = Eigen::Map<const Eigen::VectorXcd>(v.coeffs().data(), Index(n));
  CHECK(oracle::wnorm(Eigen::VectorXcd(got - ref)) <= 1e-10 * oracle::wnorm(ref));
}
