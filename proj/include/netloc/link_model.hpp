#pragma once

#include "netloc/topology.hpp"
#include "netloc/types.hpp"

namespace netloc {

/// Pairwise position information of one link: a 2x2 PSD matrix
///   N_t^2 (xi_r * J(phi) + xi_t * J(phi + pi/2)),  J(phi) = u u^T,
/// whose eigenvalues are exactly N_t^2 xi_r and N_t^2 xi_t. The bearing
/// term vanishes for single-antenna nodes.
struct LinkInformation {
  Mat2 matrix = Mat2::Zero();
  double xi_r = 0.0;   // ranging intensity
  double xi_t = 0.0;   // bearing intensity
  double angle = 0.0;  // link direction phi_ij (radians)
  int antennas = 1;
};

/// Information carried by a link with the given displacement p_i - p_j.
/// Intensities follow the power-law path loss:
///   xi_r = ref * zeta * d^-gamma
///   xi_t = ref * zeta * (f_c/beta)^2 * G * d^-(gamma+2)
LinkInformation link_information(const RadioParams& radio, const Vec2& displacement);

}  // namespace netloc
