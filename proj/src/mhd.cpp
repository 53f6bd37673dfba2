#include "scgk/mhd.hpp"

#include <cmath>
#include <random>

namespace scgk {

namespace {

const cplx I(0, 1);

// out = u'' - k2 u
void helmholtz_apply(std::span<const cplx> u, double k2, std::span<cplx> out) {
  std::vector<cplx> d(u.size());
  cheb::differentiate<cplx>(u, std::span<cplx>(d));
  cheb::differentiate<cplx>(std::span<const cplx>(d), out);
  for (std::size_t k = 0; k < u.size(); ++k) out[k] -= k2 * u[k];
}

std::vector<cplx> second_derivative(std::span<const double> u) {
  std::vector<cplx> c(u.begin(), u.end()), out(u.size());
  helmholtz_apply(c, 0.0, out);
  return out;
}

// canonical half of the mode grid: n2 > 0, or n2 == 0 and n1 >= 0
std::vector<std::pair<int, int>> canonical_modes(const ModeGrid& g) {
  std::vector<std::pair<int, int>> m;
  for (int n2 = 0; n2 <= g.N2; ++n2)
    for (int n1 = (n2 == 0 ? 0 : -g.N1); n1 <= g.N1; ++n1) m.emplace_back(n1, n2);
  return m;
}

double chebyshev_integral(int m) { return m % 2 ? 0.0 : 2.0 / (1.0 - double(m) * double(m)); }

MatrixXd identity(Index n) { return MatrixXd::Identity(n, n); }

bool finite_series(std::span<const double> a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

void Params::validate() const {
  if (!(P > 0)) throw std::invalid_argument("Prandtl number P must be positive");
  if (!std::isfinite(R)) throw std::invalid_argument("Rayleigh number R must be finite");
  if (!std::isfinite(tau)) throw std::invalid_argument("tau must be finite");
  if (!(Pm > 0)) throw std::invalid_argument("magnetic Prandtl number Pm must be positive");
  if (!(eta_value() > 0)) throw std::invalid_argument("eta must be positive");
  if (!(L1 > 0) || !(L2 > 0)) throw std::invalid_argument("periods L1, L2 must be positive");
  for (double e : e_r)
    if (!std::isfinite(e)) throw std::invalid_argument("e_r must be finite");
}

SpectralState::SpectralState(const ModeGrid& g)
    : theta(g), vT(g), vP(g), bT(g), bP(g), vM1(g.len()), vM2(g.len()), bM1(g.len()), bM2(g.len()) {}

void SpectralState::axpy(double a, const SpectralState& x) {
  theta.axpy(a, x.theta);
  vT.axpy(a, x.vT);
  vP.axpy(a, x.vP);
  bT.axpy(a, x.bT);
  bP.axpy(a, x.bP);
  vM1 += a * x.vM1;
  vM2 += a * x.vM2;
  bM1 += a * x.bM1;
  bM2 += a * x.bM2;
}

void SpectralState::scale(double a) {
  for (auto* f : {&theta, &vT, &vP, &bT, &bP}) *f *= a;
  for (auto* m : {&vM1, &vM2, &bM1, &bM2}) *m *= a;
}

bool SpectralState::all_finite() const {
  for (auto* f : {&theta, &vT, &vP, &bT, &bP})
    if (!f->all_finite()) return false;
  for (auto* m : {&vM1, &vM2, &bM1, &bM2})
    if (!finite_series(m->span())) return false;
  return std::isfinite(t);
}

double SpectralState::max_abs() const {
  double m = 0;
  for (auto* f : {&theta, &vT, &vP, &bT, &bP}) m = std::max(m, f->max_abs());
  for (auto* s : {&vM1, &vM2, &bM1, &bM2})
    for (double x : s->coeffs()) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------

struct Simulator::ModeOps {
  double ksq = 0;
  std::shared_ptr<const CorrectionBasis> dir, torb;  // shared by every mode
  std::optional<ConstraintSet> c_polb, c_polv;
  std::optional<CorrectionBasis> polb, polv;
  std::unique_ptr<ConstrainedSolver> polv_tendency;  // (k^2 - D^2) G = rhs on the poloidal_v space
};

struct Simulator::ImexOps {
  struct PerMode {
    std::unique_ptr<ConstrainedSolver> temp, torv, polv, torb, polb;
  };
  std::vector<PerMode> modes;
};

struct Simulator::Explicit {
  SpectralField3D theta;  // -(v.grad) theta + v3
  VectorField v;          // v x curl v - b x curl b + P tau v x e_r + P R theta e3
  VectorField b;          // curl(v x b)
};

Simulator::Simulator(int N1, int N2, int N3, Params p) : p_(p) {
  p_.validate();
  if (N1 < 0 || N2 < 0 || N3 < 1) throw std::invalid_argument("Simulator: need N1, N2 >= 0 and N3 >= 1");
  grid_.N1 = N1;
  grid_.N2 = N2;
  grid_.N3 = N3;
  grid_.alpha1 = 2 * std::numbers::pi / p_.L1;
  grid_.alpha2 = 2 * std::numbers::pi / p_.L2;
  tr_ = std::make_unique<Transformer>(grid_);

  const Index L = Index(grid_.len());
  const auto w = cheb::weights(grid_.len(), p_.weights);
  auto dir = std::make_shared<const CorrectionBasis>(
      prepare_correction(constraints_for(Component::kTemperature, N3), identity(L), w, "projection dirichlet"));
  auto torb = std::make_shared<const CorrectionBasis>(
      prepare_correction(constraints_for(Component::kToroidalB, N3), identity(L), w, "projection toroidal_b"));
  for (int a = 0; a <= N1; ++a)
    for (int b = 0; b <= N2; ++b) {
      auto m = std::make_unique<ModeOps>();
      m->ksq = grid_.ksq(a, b);
      m->dir = dir;
      m->torb = torb;
      if (a != 0 || b != 0) {
        const double k = std::sqrt(m->ksq);
        const std::string tag = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
        m->c_polb = constraints_for(Component::kPoloidalB, N3, k, p_.harmonic);
        m->c_polv = constraints_for(Component::kPoloidalV, N3);
        m->polb.emplace(prepare_correction(*m->c_polb, identity(L), w, "projection poloidal_b " + tag));
        m->polv.emplace(prepare_correction(*m->c_polv, identity(L), w, "projection poloidal_v " + tag));
        m->polv_tendency = std::make_unique<ConstrainedSolver>(ConstCoeffOperator{m->ksq, -1.0, 0.0}, *m->c_polv, w,
                                                               "poloidal velocity tendency " + tag);
      }
      ops_.push_back(std::move(m));
    }

  gram_.resize(L, L);
  for (Index m = 0; m < L; ++m)
    for (Index n = 0; n < L; ++n)
      gram_(m, n) = 0.5 * (chebyshev_integral(int(m + n)) + chebyshev_integral(int(std::abs(m - n))));
}

Simulator::~Simulator() = default;

const ConstraintSet& Simulator::constraints(Component c, int n1, int n2) const {
  const ModeOps& m = mode_ops(n1, n2);
  switch (c) {
    case Component::kTemperature:
    case Component::kToroidalV:
    case Component::kMeanV:
      return m.dir->constraints();
    case Component::kToroidalB:
    case Component::kMeanB:
      return m.torb->constraints();
    case Component::kPoloidalB:
      if (!m.c_polb) throw std::invalid_argument("poloidal_b has no constraints at mode (0,0)");
      return *m.c_polb;
    case Component::kPoloidalV:
      if (!m.c_polv) throw std::invalid_argument("poloidal_v has no constraints at mode (0,0)");
      return *m.c_polv;
  }
  throw std::invalid_argument("unknown component");
}

VectorField Simulator::velocity(const SpectralState& s) const {
  TPMDecomposition d(grid_);
  d.toroidal = s.vT;
  d.poloidal = s.vP;
  d.mean1 = s.vM1;
  d.mean2 = s.vM2;
  return reconstruct_vector(d);
}

VectorField Simulator::magnetic(const SpectralState& s) const {
  TPMDecomposition d(grid_);
  d.toroidal = s.bT;
  d.poloidal = s.bP;
  d.mean1 = s.bM1;
  d.mean2 = s.bM2;
  return reconstruct_vector(d);
}

Simulator::Explicit Simulator::explicit_terms(const SpectralState& s) const {
  if (!(s.grid() == grid_)) throw std::invalid_argument("state grid does not match the simulator");
  if (!s.all_finite()) throw NumericalError("non-finite values in the state");
  Explicit e{SpectralField3D(grid_), make_vector_field(grid_), make_vector_field(grid_)};
  const VectorField v = velocity(s);

  if (!p_.linear_only) {
    const bool has_b = s.bT.max_abs() > 0 || s.bP.max_abs() > 0 ||
                       std::any_of(s.bM1.coeffs().begin(), s.bM1.coeffs().end(), [](double x) { return x != 0; }) ||
                       std::any_of(s.bM2.coeffs().begin(), s.bM2.coeffs().end(), [](double x) { return x != 0; });
    const VectorField w = curl(v);
    const VectorField gt = gradient(s.theta);
    std::vector<const SpectralField3D*> src{&v[0], &v[1], &v[2], &w[0], &w[1], &w[2], &gt[0], &gt[1], &gt[2]};
    VectorField b, j;
    if (has_b) {
      b = magnetic(s);
      j = curl(b);
      for (int c = 0; c < 3; ++c) src.push_back(&b[c]);
      for (int c = 0; c < 3; ++c) src.push_back(&j[c]);
    }
    std::vector<PhysicalField3D> ph(src.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < int(src.size()); ++i) ph[std::size_t(i)] = tr_->to_physical(*src[std::size_t(i)]);

    const int P1 = tr_->P1(), P2 = tr_->P2(), P3 = tr_->P3();
    std::array<PhysicalField3D, 3> fv, vb;
    for (int c = 0; c < 3; ++c) {
      fv[c] = PhysicalField3D(P1, P2, P3);
      vb[c] = PhysicalField3D(P1, P2, P3);
    }
    PhysicalField3D fth(P1, P2, P3);
    bool bad_inertia = false, bad_lorentz = false, bad_adv = false, bad_ind = false;
    const std::size_t npts = ph[0].values.size();
    for (std::size_t i = 0; i < npts; ++i) {
      const double v1 = ph[0].values[i], v2 = ph[1].values[i], v3 = ph[2].values[i];
      const double w1 = ph[3].values[i], w2 = ph[4].values[i], w3 = ph[5].values[i];
      double f1 = v2 * w3 - v3 * w2, f2 = v3 * w1 - v1 * w3, f3 = v1 * w2 - v2 * w1;
      const double a = -(v1 * ph[6].values[i] + v2 * ph[7].values[i] + v3 * ph[8].values[i]);
      bad_inertia |= !std::isfinite(f1 + f2 + f3);
      bad_adv |= !std::isfinite(a);
      if (has_b) {
        const double b1 = ph[9].values[i], b2 = ph[10].values[i], b3 = ph[11].values[i];
        const double j1 = ph[12].values[i], j2 = ph[13].values[i], j3 = ph[14].values[i];
        const double l1 = b2 * j3 - b3 * j2, l2 = b3 * j1 - b1 * j3, l3 = b1 * j2 - b2 * j1;
        bad_lorentz |= !std::isfinite(l1 + l2 + l3);
        f1 -= l1;
        f2 -= l2;
        f3 -= l3;
        vb[0].values[i] = v2 * b3 - v3 * b2;
        vb[1].values[i] = v3 * b1 - v1 * b3;
        vb[2].values[i] = v1 * b2 - v2 * b1;
        bad_ind |= !std::isfinite(vb[0].values[i] + vb[1].values[i] + vb[2].values[i]);
      }
      fv[0].values[i] = f1;
      fv[1].values[i] = f2;
      fv[2].values[i] = f3;
      fth.values[i] = a;
    }
    if (bad_inertia) throw NumericalError("non-finite values in the inertial term v x curl v");
    if (bad_lorentz) throw NumericalError("non-finite values in the Lorentz term b x curl b");
    if (bad_adv) throw NumericalError("non-finite values in the advection term (v.grad) theta");
    if (bad_ind) throw NumericalError("non-finite values in the induction term curl(v x b)");

    std::vector<const PhysicalField3D*> back{&fv[0], &fv[1], &fv[2], &fth};
    if (has_b)
      for (int c = 0; c < 3; ++c) back.push_back(&vb[c]);
    std::vector<SpectralField3D> sp(back.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < int(back.size()); ++i) sp[std::size_t(i)] = tr_->to_spectral(*back[std::size_t(i)]);
    for (int c = 0; c < 3; ++c) e.v[c] = std::move(sp[std::size_t(c)]);
    e.theta = std::move(sp[3]);
    if (has_b) e.b = curl(VectorField{std::move(sp[4]), std::move(sp[5]), std::move(sp[6])});
  }

  // linear explicit terms: buoyancy, rotation, v3 in the heat equation
  const double rot = p_.P * p_.tau, buoy = p_.P * p_.R;
  const auto& er = p_.e_r;
  for (std::size_t i = 0; i < e.theta.data().size(); ++i) {
    const cplx v1 = v[0].data()[i], v2 = v[1].data()[i], v3 = v[2].data()[i];
    e.v[0].data()[i] += rot * (v2 * er[2] - v3 * er[1]);
    e.v[1].data()[i] += rot * (v3 * er[0] - v1 * er[2]);
    e.v[2].data()[i] += rot * (v1 * er[1] - v2 * er[0]) + buoy * s.theta.data()[i];
    e.theta.data()[i] += v3;
  }
  return e;
}

SpectralState Simulator::rhs(const SpectralState& s) const {
  const Explicit e = explicit_terms(s);
  SpectralState out(grid_);
  const double P = p_.P, eta = p_.eta_value();
  const std::size_t L = grid_.len();
  const auto modes = canonical_modes(grid_);

#pragma omp parallel for schedule(dynamic)
  for (int mi = 0; mi < int(modes.size()); ++mi) {
    const auto [n1, n2] = modes[std::size_t(mi)];
    const ModeOps& mo = mode_ops(n1, n2);
    std::vector<cplx> f(L), lap(L);
    if (n1 == 0 && n2 == 0) {
      helmholtz_apply(s.theta.mode(0, 0), 0.0, lap);
      auto th = out.theta.mode(0, 0);
      for (std::size_t k = 0; k < L; ++k) th[k] = cplx((e.theta(0, 0, int(k)) + lap[k]).real(), 0.0);
      mo.dir->correct_inplace<cplx>(th);
      auto mean = [&](const ChebSeries<double>& m, const SpectralField3D& F, double nu, const CorrectionBasis& cb,
                      ChebSeries<double>& dst) {
        auto d2 = second_derivative(m.span());
        for (std::size_t k = 0; k < L; ++k) dst[k] = F(0, 0, int(k)).real() + nu * d2[k].real();
        cb.correct_inplace<double>(std::span<double>(dst.coeffs()));
      };
      mean(s.vM1, e.v[0], P, *mo.dir, out.vM1);
      mean(s.vM2, e.v[1], P, *mo.dir, out.vM2);
      mean(s.bM1, e.b[0], eta, *mo.torb, out.bM1);
      mean(s.bM2, e.b[1], eta, *mo.torb, out.bM2);
      continue;
    }
    const double k1 = grid_.k1(n1), k2 = grid_.k2(n2), ksq = mo.ksq;

    // temperature
    helmholtz_apply(s.theta.mode(n1, n2), ksq, lap);
    auto th = out.theta.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k) th[k] = e.theta(n1, n2, int(k)) + lap[k];
    mo.dir->correct_inplace<cplx>(th);

    // toroidal velocity
    helmholtz_apply(s.vT.mode(n1, n2), ksq, lap);
    auto vt = out.vT.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k)
      vt[k] = -I * (k2 * e.v[0](n1, n2, int(k)) - k1 * e.v[1](n1, n2, int(k))) / ksq + P * lap[k];
    mo.dir->correct_inplace<cplx>(vt);

    // poloidal velocity: (k^2 - D^2) G = H / k^2 - P (D^2 - k^2)^2 V
    {
      std::vector<cplx> lap2(L);
      helmholtz_apply(s.vP.mode(n1, n2), ksq, lap);
      helmholtz_apply(std::span<const cplx>(lap), ksq, lap2);
      const auto h = poloidal_velocity_rhs(e.v, n1, n2);
      auto vp = out.vP.mode(n1, n2);
      for (std::size_t k = 0; k < L; ++k) vp[k] = h[k] / ksq - P * lap2[k];
      mo.polv_tendency->solve_inplace<cplx>(vp);
    }

    // toroidal and poloidal magnetic field
    helmholtz_apply(s.bT.mode(n1, n2), ksq, lap);
    auto bt = out.bT.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k)
      bt[k] = -I * (k2 * e.b[0](n1, n2, int(k)) - k1 * e.b[1](n1, n2, int(k))) / ksq + eta * lap[k];
    mo.torb->correct_inplace<cplx>(bt);

    helmholtz_apply(s.bP.mode(n1, n2), ksq, lap);
    auto bp = out.bP.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k) bp[k] = e.b[2](n1, n2, int(k)) / ksq + eta * lap[k];
    mo.polb->correct_inplace<cplx>(bp);
  }
  for (auto* fld : {&out.theta, &out.vT, &out.vP, &out.bT, &out.bP}) fld->enforce_reality();
  if (!out.all_finite()) throw NumericalError("non-finite values in the projected tendency");
  return out;
}

SpectralState Simulator::step_euler(const SpectralState& s, double dt) const {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  SpectralState out = s;
  out.axpy(dt, rhs(s));
  out.t = s.t + dt;
  return out;
}

SpectralState Simulator::step_rk4(const SpectralState& s, double dt) const {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  const SpectralState d1 = rhs(s);
  SpectralState u = s;
  u.axpy(0.5 * dt, d1);
  const SpectralState d2 = rhs(u);
  u = s;
  u.axpy(0.5 * dt, d2);
  const SpectralState d3 = rhs(u);
  u = s;
  u.axpy(dt, d3);
  const SpectralState d4 = rhs(u);
  SpectralState out = s;
  out.axpy(dt / 6, d1);
  out.axpy(dt / 3, d2);
  out.axpy(dt / 3, d3);
  out.axpy(dt / 6, d4);
  out.t = s.t + dt;
  return out;
}

const Simulator::ImexOps& Simulator::imex_ops(double dt) const {
  std::lock_guard<std::mutex> lock(imex_mutex_);
  auto it = imex_.find(dt);
  if (it != imex_.end()) return *it->second;
  if (imex_.size() >= 4) imex_.clear();
  auto ops = std::make_shared<ImexOps>();
  const auto w = cheb::weights(grid_.len(), p_.weights);
  const double P = p_.P, eta = p_.eta_value();
  for (int a = 0; a <= grid_.N1; ++a)
    for (int b = 0; b <= grid_.N2; ++b) {
      const ModeOps& mo = mode_ops(a, b);
      const double k2 = mo.ksq;
      const std::string tag = " mode (" + std::to_string(a) + "," + std::to_string(b) + ")";
      ImexOps::PerMode pm;
      try {
        pm.temp = std::make_unique<ConstrainedSolver>(ConstCoeffOperator{1 + dt * k2, -dt, 0}, mo.dir->constraints(), w,
                                                      "implicit temperature" + tag);
        pm.torv = std::make_unique<ConstrainedSolver>(ConstCoeffOperator{1 + dt * P * k2, -dt * P, 0},
                                                      mo.dir->constraints(), w, "implicit toroidal velocity" + tag);
        pm.torb = std::make_unique<ConstrainedSolver>(ConstCoeffOperator{1 + dt * eta * k2, -dt * eta, 0},
                                                      mo.torb->constraints(), w, "implicit toroidal magnetic" + tag);
        if (a != 0 || b != 0) {
          pm.polb = std::make_unique<ConstrainedSolver>(ConstCoeffOperator{1 + dt * eta * k2, -dt * eta, 0},
                                                        *mo.c_polb, w, "implicit poloidal magnetic" + tag);
          pm.polv = std::make_unique<ConstrainedSolver>(
              ConstCoeffOperator{k2 * (1 + dt * P * k2), -(1 + 2 * dt * P * k2), dt * P}, *mo.c_polv, w,
              "implicit poloidal velocity" + tag);
        }
      } catch (const SingularOperatorError& e) {
        throw NumericalError(std::string("singular implicit operator: ") + e.what());
      }
      ops->modes.push_back(std::move(pm));
    }
  imex_[dt] = ops;
  return *ops;
}

SpectralState Simulator::step_imex(const SpectralState& s, double dt) const {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  const Explicit e = explicit_terms(s);
  const ImexOps& io = imex_ops(dt);
  SpectralState out(grid_);
  const std::size_t L = grid_.len();
  const auto modes = canonical_modes(grid_);

#pragma omp parallel for schedule(dynamic)
  for (int mi = 0; mi < int(modes.size()); ++mi) {
    const auto [n1, n2] = modes[std::size_t(mi)];
    const auto& pm = io.modes[std::size_t(std::abs(n1)) * (grid_.N2 + 1) + std::abs(n2)];
    auto th = out.theta.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k) th[k] = s.theta(n1, n2, int(k)) + dt * e.theta(n1, n2, int(k));
    if (n1 == 0 && n2 == 0) {
      for (auto& x : th) x = cplx(x.real(), 0.0);
      pm.temp->solve_inplace<cplx>(th);
      auto mean = [&](const ChebSeries<double>& m, const SpectralField3D& F, const ConstrainedSolver& sol,
                      ChebSeries<double>& dst) {
        for (std::size_t k = 0; k < L; ++k) dst[k] = m[k] + dt * F(0, 0, int(k)).real();
        sol.solve_inplace<double>(std::span<double>(dst.coeffs()));
      };
      mean(s.vM1, e.v[0], *pm.torv, out.vM1);
      mean(s.vM2, e.v[1], *pm.torv, out.vM2);
      mean(s.bM1, e.b[0], *pm.torb, out.bM1);
      mean(s.bM2, e.b[1], *pm.torb, out.bM2);
      continue;
    }
    pm.temp->solve_inplace<cplx>(th);
    const double k1 = grid_.k1(n1), k2 = grid_.k2(n2), ksq = grid_.ksq(n1, n2);

    auto vt = out.vT.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k)
      vt[k] = s.vT(n1, n2, int(k)) - dt * I * (k2 * e.v[0](n1, n2, int(k)) - k1 * e.v[1](n1, n2, int(k))) / ksq;
    pm.torv->solve_inplace<cplx>(vt);

    // (k^2 - D^2) V_old + dt H / k^2
    std::vector<cplx> lap(L);
    helmholtz_apply(s.vP.mode(n1, n2), ksq, lap);
    const auto h = poloidal_velocity_rhs(e.v, n1, n2);
    auto vp = out.vP.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k) vp[k] = -lap[k] + dt * h[k] / ksq;
    pm.polv->solve_inplace<cplx>(vp);

    auto bt = out.bT.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k)
      bt[k] = s.bT(n1, n2, int(k)) - dt * I * (k2 * e.b[0](n1, n2, int(k)) - k1 * e.b[1](n1, n2, int(k))) / ksq;
    pm.torb->solve_inplace<cplx>(bt);

    auto bp = out.bP.mode(n1, n2);
    for (std::size_t k = 0; k < L; ++k) bp[k] = s.bP(n1, n2, int(k)) + dt * e.b[2](n1, n2, int(k)) / ksq;
    pm.polb->solve_inplace<cplx>(bp);
  }
  for (auto* fld : {&out.theta, &out.vT, &out.vP, &out.bT, &out.bP}) fld->enforce_reality();
  out.t = s.t + dt;
  if (!out.all_finite()) throw NumericalError("non-finite values after the implicit solves");
  return out;
}

SpectralState Simulator::step(Scheme scheme, const SpectralState& s, double dt) const {
  switch (scheme) {
    case Scheme::kEuler: return step_euler(s, dt);
    case Scheme::kRK4: return step_rk4(s, dt);
    case Scheme::kIMEX: return step_imex(s, dt);
  }
  throw std::invalid_argument("unknown scheme");
}

EnergySample Simulator::energies(const SpectralState& s) const {
  auto energy = [&](const VectorField& F) {
    double e = 0;
    const Index L = Index(grid_.len());
    for (const auto& c : F)
      for (int n1 = -grid_.N1; n1 <= grid_.N1; ++n1)
        for (int n2 = -grid_.N2; n2 <= grid_.N2; ++n2) {
          auto m = c.mode(n1, n2);
          Eigen::Map<const Eigen::VectorXcd> x(m.data(), L);
          e += (x.adjoint() * gram_ * x).real()(0, 0);
        }
    return 0.5 * p_.L1 * p_.L2 * e;
  };
  return {s.t, energy(velocity(s)), energy(magnetic(s))};
}

double Simulator::max_constraint_violation(const SpectralState& s) const {
  double worst = 0;
  for (int n1 = -grid_.N1; n1 <= grid_.N1; ++n1)
    for (int n2 = -grid_.N2; n2 <= grid_.N2; ++n2) {
      const ModeOps& mo = mode_ops(n1, n2);
      const auto& dir = mo.dir->constraints();
      const auto& torb = mo.torb->constraints();
      worst = std::max(worst, dir.relative_violation<cplx>(s.theta.mode(n1, n2)));
      if (n1 == 0 && n2 == 0) continue;
      worst = std::max(worst, dir.relative_violation<cplx>(s.vT.mode(n1, n2)));
      worst = std::max(worst, mo.c_polv->relative_violation<cplx>(s.vP.mode(n1, n2)));
      worst = std::max(worst, torb.relative_violation<cplx>(s.bT.mode(n1, n2)));
      worst = std::max(worst, mo.c_polb->relative_violation<cplx>(s.bP.mode(n1, n2)));
    }
  const ModeOps& m0 = mode_ops(0, 0);
  for (auto* m : {&s.vM1, &s.vM2}) worst = std::max(worst, m0.dir->constraints().relative_violation<double>(m->span()));
  for (auto* m : {&s.bM1, &s.bM2})
    worst = std::max(worst, m0.torb->constraints().relative_violation<double>(m->span()));
  return worst;
}

void Simulator::project(SpectralState& s) const {
  for (int n1 = -grid_.N1; n1 <= grid_.N1; ++n1)
    for (int n2 = -grid_.N2; n2 <= grid_.N2; ++n2) {
      const ModeOps& mo = mode_ops(n1, n2);
      mo.dir->correct_inplace<cplx>(s.theta.mode(n1, n2));
      if (n1 == 0 && n2 == 0) {
        for (auto* f : {&s.vT, &s.vP, &s.bT, &s.bP})
          for (auto& x : f->mode(0, 0)) x = 0;
        continue;
      }
      mo.dir->correct_inplace<cplx>(s.vT.mode(n1, n2));
      mo.polv->correct_inplace<cplx>(s.vP.mode(n1, n2));
      mo.torb->correct_inplace<cplx>(s.bT.mode(n1, n2));
      mo.polb->correct_inplace<cplx>(s.bP.mode(n1, n2));
    }
  const ModeOps& m0 = mode_ops(0, 0);
  m0.dir->correct_inplace<double>(std::span<double>(s.vM1.coeffs()));
  m0.dir->correct_inplace<double>(std::span<double>(s.vM2.coeffs()));
  m0.torb->correct_inplace<double>(std::span<double>(s.bM1.coeffs()));
  m0.torb->correct_inplace<double>(std::span<double>(s.bM2.coeffs()));
  for (auto* f : {&s.theta, &s.vT, &s.vP, &s.bT, &s.bP}) f->enforce_reality();
}

SpectralState Simulator::random_state(std::uint64_t seed, const RandomAmplitudes& a) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  SpectralState s(grid_);
  const int M1 = std::min(a.max_mode, grid_.N1), M2 = std::min(a.max_mode, grid_.N2);
  const int deg = std::min(a.max_degree, grid_.N3 + 1);
  for (const auto& [n1, n2] : canonical_modes(grid_)) {
    if (std::abs(n1) > M1 || n2 > M2) continue;
    const bool mean = n1 == 0 && n2 == 0;
    const double k = std::sqrt(grid_.ksq(n1, n2));
    for (int d = 0; d <= deg; ++d) {
      auto draw = [&](double amp) { return mean ? cplx(amp * nd(rng), 0) : cplx(amp * nd(rng), amp * nd(rng)); };
      s.theta(n1, n2, d) = draw(a.theta);
      if (mean) {
        s.vM1[std::size_t(d)] = a.v * nd(rng);
        s.vM2[std::size_t(d)] = a.v * nd(rng);
        s.bM1[std::size_t(d)] = a.b * nd(rng);
        s.bM2[std::size_t(d)] = a.b * nd(rng);
      } else {
        s.vT(n1, n2, d) = draw(a.v / k);
        s.vP(n1, n2, d) = draw(a.v / (k * k));
        s.bT(n1, n2, d) = draw(a.b / k);
        s.bP(n1, n2, d) = draw(a.b / (k * k));
      }
    }
  }
  project(s);
  return s;
}

SpectralState Simulator::roll_state(double theta_amp, double v_amp, double b_amp) const {
  if (grid_.N1 < 1) throw std::invalid_argument("roll initial condition needs N1 >= 1");
  RandomAmplitudes ra;
  ra.theta = 0;
  ra.v = 0;
  ra.b = b_amp;
  SpectralState s = random_state(1, ra);
  // cos(a1 x1) (1 - x3^2) and cos(a1 x1) (1 - x3^2)^2
  const double th[] = {0.25, 0, -0.25};
  const double vp[] = {0.1875, 0, -0.25, 0, 0.0625};
  const double k2 = grid_.ksq(1, 0);
  for (int d = 0; d < 3 && d < int(grid_.len()); ++d) s.theta(1, 0, d) = theta_amp * th[d];
  for (int d = 0; d < 5 && d < int(grid_.len()); ++d) s.vP(1, 0, d) = v_amp * vp[d] / k2;
  project(s);
  return s;
}

}  // namespace scgk
