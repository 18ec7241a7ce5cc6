#include "netloc/link_model.hpp"

#include <cmath>

namespace netloc {

LinkInformation link_information(const RadioParams& radio, const Vec2& displacement) {
  const double d = displacement.norm();
  if (d <= 0.0)
    throw std::invalid_argument("link_information: co-located nodes (zero displacement)");

  LinkInformation li;
  li.antennas = radio.antennas;
  li.angle = std::atan2(displacement.y(), displacement.x());

  const double gamma = radio.path_loss_exponent;
  const double xi = radio.ref_ranging_info * radio.ranging_coeff * std::pow(d, -gamma);
  li.xi_r = xi;
  const double g = radio.bearing_aperture();
  const double fc_over_beta = radio.carrier_hz / radio.bandwidth_hz;
  li.xi_t = xi * fc_over_beta * fc_over_beta * g / (d * d);

  const double nt2 = static_cast<double>(radio.antennas) * radio.antennas;
  li.matrix = nt2 * (li.xi_r * dir_projector(li.angle) +
                     li.xi_t * dir_projector(li.angle + M_PI / 2.0));
  return li;
}

}  // namespace netloc
