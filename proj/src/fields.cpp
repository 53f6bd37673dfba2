#include "scgk/fields.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace scgk {

namespace {
const cplx I(0, 1);

void check_same_grid(const VectorField& F) {
  if (!(F[0].grid() == F[1].grid()) || !(F[0].grid() == F[2].grid()))
    throw std::invalid_argument("vector field components on different grids");
}
}  // namespace

VectorField make_vector_field(const ModeGrid& g) { return {SpectralField3D(g), SpectralField3D(g), SpectralField3D(g)}; }

TPMDecomposition::TPMDecomposition(const ModeGrid& g)
    : toroidal(g), poloidal(g), mean1(std::size_t(g.len())), mean2(std::size_t(g.len())) {}

SpectralField3D ddx3(const SpectralField3D& u) {
  const ModeGrid& g = u.grid();
  SpectralField3D d(g, u.is_real());
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) cheb::differentiate<cplx>(u.mode(n1, n2), d.mode(n1, n2));
  return d;
}

VectorField gradient(const SpectralField3D& u) {
  const ModeGrid& g = u.grid();
  VectorField G = make_vector_field(g);
  for (auto& c : G) c.set_real(u.is_real());
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      auto a = u.mode(n1, n2);
      auto g1 = G[0].mode(n1, n2), g2 = G[1].mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k) {
        g1[k] = I * g.k1(n1) * a[k];
        g2[k] = I * g.k2(n2) * a[k];
      }
    }
  G[2] = ddx3(u);
  return G;
}

SpectralField3D divergence(const VectorField& F) {
  check_same_grid(F);
  const ModeGrid& g = F[0].grid();
  SpectralField3D d = ddx3(F[2]);
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      auto out = d.mode(n1, n2);
      auto f1 = F[0].mode(n1, n2), f2 = F[1].mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k) out[k] += I * (g.k1(n1) * f1[k] + g.k2(n2) * f2[k]);
    }
  d.set_real(F[0].is_real() && F[1].is_real() && F[2].is_real());
  return d;
}

VectorField curl(const VectorField& F) {
  check_same_grid(F);
  const ModeGrid& g = F[0].grid();
  SpectralField3D d1 = ddx3(F[0]), d2 = ddx3(F[1]);
  VectorField C = make_vector_field(g);
  const bool real = F[0].is_real() && F[1].is_real() && F[2].is_real();
  for (auto& c : C) c.set_real(real);
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      const double k1 = g.k1(n1), k2 = g.k2(n2);
      auto f1 = F[0].mode(n1, n2), f2 = F[1].mode(n1, n2), f3 = F[2].mode(n1, n2);
      auto a = d1.mode(n1, n2), b = d2.mode(n1, n2);
      auto c1 = C[0].mode(n1, n2), c2 = C[1].mode(n1, n2), c3 = C[2].mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k) {
        c1[k] = I * k2 * f3[k] - b[k];
        c2[k] = a[k] - I * k1 * f3[k];
        c3[k] = I * (k1 * f2[k] - k2 * f1[k]);
      }
    }
  return C;
}

double relative_divergence(const VectorField& F) {
  check_same_grid(F);
  const ModeGrid& g = F[0].grid();
  const double num = divergence(F).weighted_norm_sq();
  double den = ddx3(F[2]).weighted_norm_sq();
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      auto f1 = F[0].mode(n1, n2), f2 = F[1].mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k)
        den += cheb::weight(k) * (std::norm(g.k1(n1) * f1[k]) + std::norm(g.k2(n2) * f2[k]));
    }
  return den == 0 ? 0.0 : std::sqrt(num / den);
}

TPMDecomposition decompose_solenoidal(const VectorField& F, double warn_threshold) {
  check_same_grid(F);
  if (warn_threshold > 0) {
    const double div = relative_divergence(F);
    if (div > warn_threshold)
      std::cerr << "warning: decomposing a field with relative divergence " << div << "\n";
  }
  const ModeGrid& g = F[0].grid();
  TPMDecomposition d(g);
  const bool real = F[0].is_real() && F[1].is_real() && F[2].is_real();
  d.toroidal.set_real(real);
  d.poloidal.set_real(real);
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const double k1 = g.k1(n1), k2 = g.k2(n2), ksq = g.ksq(n1, n2);
      auto f1 = F[0].mode(n1, n2), f2 = F[1].mode(n1, n2), f3 = F[2].mode(n1, n2);
      auto gt = d.toroidal.mode(n1, n2), gp = d.poloidal.mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k) {
        gt[k] = -I * (k2 * f1[k] - k1 * f2[k]) / ksq;
        gp[k] = f3[k] / ksq;
      }
    }
  auto m1 = F[0].mode(0, 0), m2 = F[1].mode(0, 0);
  for (std::size_t k = 0; k < g.len(); ++k) {
    d.mean1[k] = m1[k].real();
    d.mean2[k] = m2[k].real();
  }
  return d;
}

VectorField reconstruct_vector(const TPMDecomposition& d) {
  const ModeGrid& g = d.toroidal.grid();
  VectorField F = make_vector_field(g);
  const bool real = d.toroidal.is_real() && d.poloidal.is_real();
  for (auto& c : F) c.set_real(real);
  const SpectralField3D dp = ddx3(d.poloidal);
  for (int n1 = -g.N1; n1 <= g.N1; ++n1)
    for (int n2 = -g.N2; n2 <= g.N2; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const double k1 = g.k1(n1), k2 = g.k2(n2), ksq = g.ksq(n1, n2);
      auto gt = d.toroidal.mode(n1, n2), gp = d.poloidal.mode(n1, n2), gpd = dp.mode(n1, n2);
      auto f1 = F[0].mode(n1, n2), f2 = F[1].mode(n1, n2), f3 = F[2].mode(n1, n2);
      for (std::size_t k = 0; k < g.len(); ++k) {
        f1[k] = I * (k2 * gt[k] + k1 * gpd[k]);
        f2[k] = I * (-k1 * gt[k] + k2 * gpd[k]);
        f3[k] = ksq * gp[k];
      }
    }
  auto m1 = F[0].mode(0, 0), m2 = F[1].mode(0, 0);
  for (std::size_t k = 0; k < g.len() && k < d.mean1.size(); ++k) m1[k] = d.mean1[k];
  for (std::size_t k = 0; k < g.len() && k < d.mean2.size(); ++k) m2[k] = d.mean2[k];
  return F;
}

ChebSeries<cplx> poloidal_velocity_rhs(const VectorField& F, int n1, int n2) {
  check_same_grid(F);
  if (n1 == 0 && n2 == 0) throw std::invalid_argument("poloidal_velocity_rhs: mode (0,0) has no poloidal part");
  const ModeGrid& g = F[0].grid();
  if (std::abs(n1) > g.N1 || std::abs(n2) > g.N2) throw std::out_of_range("poloidal_velocity_rhs: mode out of range");
  const std::size_t L = g.len();
  ChebSeries<cplx> h(L), d1(L), d2(L);
  cheb::differentiate<cplx>(F[0].mode(n1, n2), std::span<cplx>(d1.coeffs()));
  cheb::differentiate<cplx>(F[1].mode(n1, n2), std::span<cplx>(d2.coeffs()));
  auto f3 = F[2].mode(n1, n2);
  for (std::size_t k = 0; k < L; ++k) h[k] = g.ksq(n1, n2) * f3[k] + I * (g.k1(n1) * d1[k] + g.k2(n2) * d2[k]);
  return h;
}

std::string component_name(Component c) {
  switch (c) {
    case Component::kTemperature: return "temperature";
    case Component::kToroidalB: return "toroidal_b";
    case Component::kPoloidalB: return "poloidal_b";
    case Component::kMeanB: return "mean_b";
    case Component::kToroidalV: return "toroidal_v";
    case Component::kPoloidalV: return "poloidal_v";
    case Component::kMeanV: return "mean_v";
  }
  return "unknown";
}

ConstraintSet constraints_for(Component c, int N3, double k, HarmonicSign h) {
  if (N3 < 0) throw std::invalid_argument("constraints_for: N3 must be non-negative");
  const std::size_t M = std::size_t(N3 + 1);  // highest degree
  using Rows = std::vector<std::vector<double>>;
  switch (c) {
    case Component::kTemperature:
    case Component::kToroidalV:
    case Component::kMeanV:
      return ConstraintSet(Rows{cheb::boundary_row(0, 1, M), cheb::boundary_row(0, -1, M)});
    case Component::kToroidalB:
    case Component::kMeanB:
      return ConstraintSet(Rows{cheb::boundary_row(0, 1, M), cheb::boundary_row(1, -1, M)});
    case Component::kPoloidalB: {
      if (!(k > 0)) throw std::invalid_argument("constraints_for: poloidal_b needs a nonzero wavenumber");
      std::vector<double> top(M + 1), curv(M + 1);
      const double sgn = h == HarmonicSign::kGrowing ? -1.0 : 1.0;
      for (std::size_t j = 0; j <= M; ++j) {
        const double jj = double(j) * double(j);
        top[j] = k + sgn * jj;
        // 3 T_j''(-1)
        curv[j] = (j % 2 ? -1.0 : 1.0) * (jj * jj - jj);
      }
      return ConstraintSet(Rows{top, curv, cheb::boundary_row(0, -1, M)});
    }
    case Component::kPoloidalV:
      return ConstraintSet(Rows{cheb::boundary_row(0, 1, M), cheb::boundary_row(0, -1, M),
                                cheb::boundary_row(1, 1, M), cheb::boundary_row(1, -1, M)});
  }
  throw std::invalid_argument("constraints_for: unknown component");
}

}  // namespace scgk
