#pragma once

#include <array>
#include <string>

#include "scgk/galerkin.hpp"
#include "scgk/transforms.hpp"

namespace scgk {

using VectorField = std::array<SpectralField3D, 3>;

VectorField make_vector_field(const ModeGrid& g);

// toroidal and poloidal potentials per mode ((0,0) entries unused and zero), plus the horizontal mean
struct TPMDecomposition {
  SpectralField3D toroidal, poloidal;
  ChebSeries<double> mean1, mean2;

  explicit TPMDecomposition(const ModeGrid& g = {});
};

// d/dx3 of every mode
SpectralField3D ddx3(const SpectralField3D& u);
VectorField gradient(const SpectralField3D& u);
SpectralField3D divergence(const VectorField& F);
VectorField curl(const VectorField& F);

// |div F| / |(d1 F1, d2 F2, d3 F3)| in the weighted spectral norm; 0 for F = 0
double relative_divergence(const VectorField& F);

// G_T from the horizontal curl, G_P = F3 / k^2, mean from the (0,0) horizontal components.
// When warn_threshold > 0 a warning goes to stderr if relative_divergence(F) exceeds it.
TPMDecomposition decompose_solenoidal(const VectorField& F, double warn_threshold = 1e-8);

// toroidal (i k2 G, -i k1 G, 0) + poloidal (i k1 G', i k2 G', k^2 G) + (M1, M2, 0)
VectorField reconstruct_vector(const TPMDecomposition& d);

// k^2 F3 + i k1 F1' + i k2 F2', the x3 component of curl curl F; a poloidal potential G with
// k^2 (k^2 G - G'') equal to this reproduces the poloidal part of F
ChebSeries<cplx> poloidal_velocity_rhs(const VectorField& F, int n1, int n2);

enum class Component { kTemperature, kToroidalB, kPoloidalB, kMeanB, kToroidalV, kPoloidalV, kMeanV };

// row used at x3 = +1 for poloidal_b: (k - j^2), matching an exterior field ~ exp(k x3), or
// (k + j^2) which matches an exterior potential field decaying away from the wall
enum class HarmonicSign { kGrowing, kDecaying };

std::string component_name(Component c);

// rows on the N3+2 coefficients of one mode; k is the horizontal wavenumber (poloidal_b only)
ConstraintSet constraints_for(Component c, int N3, double k = 0, HarmonicSign h = HarmonicSign::kGrowing);

}  // namespace scgk
