#pragma once

#include <span>
#include <vector>

#include "netloc/topology.hpp"
#include "netloc/types.hpp"

namespace netloc {

/// One-step pseudo-transition stencil of an infinite lattice: offsets
/// within the communication range (lattice units) and their normalized
/// blocks. Symmetric under x -> -x; blocks sum to the identity.
struct NeighborStencil {
  std::vector<Eigen::Vector2i> offsets;
  std::vector<Mat2> blocks;
  Mat2 npi = Mat2::Zero();  // D of a stencil node (meters-based units)
  double spacing = 1.0;     // meters per lattice step
};

NeighborStencil lattice_stencil(const RadioParams& radio, double spacing_m);

/// Fourier transform of the stencil at frequency theta (radians per
/// lattice step) and the second-moment matrix
///   Sigma2(theta) = ||theta||^-2 sum_x (x^T theta)^2 T(0,x).
/// Sigma2 depends only on the direction of theta; theta = 0 uses the
/// (1,0) directional limit.
struct SpectralSample {
  Vec2 theta = Vec2::Zero();
  Eigen::Matrix2cd phi = Eigen::Matrix2cd::Identity();
  Mat2 sigma2 = Mat2::Zero();
};

SpectralSample pseudo_characteristic(const NeighborStencil& stencil, const Vec2& theta);

struct QuadratureSpec {
  int n_angular = 256;
  int n_radial = 512;        // geometric shells
  double r_min_frac = 1e-4;  // innermost shell radius as a fraction of pi
};

/// Infinite-lattice potential by quadrature over the disk ||theta|| <= pi:
///   P(x) = (2 pi)^-2 integral (I - Phi)^{-1} (1 - cos(x^T theta)) dtheta.
/// The odd (imaginary) part of the integrand cancels exactly for the
/// symmetric stencil, so the integration is carried out in real
/// arithmetic. Returns the zero matrix at zero displacement.
Mat2 potential_infinite(const NeighborStencil& stencil, const Eigen::Vector2i& displacement,
                        const QuadratureSpec& quad = {});

enum class FitModel { Log, Quadratic, Sqrt, Linear };

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of value against f(distance) with f determined by
/// the model (ln d, d^2, sqrt d, or d). Requires >= 8 points with
/// positive increasing abscissae.
FitResult asymptote_fit(std::span<const double> distance, std::span<const double> value,
                        FitModel model);

}  // namespace netloc
