#include "netloc/measurements.hpp"

#include <cmath>

#include "netloc/rng.hpp"

namespace netloc {

void ChannelParams::validate() const {
  if (path_loss_exponent <= 0 || ref_dist_m <= 0 || max_range_m <= 0)
    throw std::invalid_argument("ChannelParams: distances and exponent must be positive");
  if (sigma_rss_db < 0 || sigma_aoa_rad < 0)
    throw std::invalid_argument("ChannelParams: noise levels must be non-negative");
}

double ChannelParams::rss_mean_dbm(double dist_m) const {
  return tx_power_dbm - ref_loss_db -
         10.0 * path_loss_exponent * std::log10(dist_m / ref_dist_m);
}

double ChannelParams::range_from_rss(double rss_dbm) const {
  return std::pow(10.0, (tx_power_dbm - ref_loss_db - rss_dbm) /
                            (10.0 * path_loss_exponent)) *
         ref_dist_m;
}

MeasurementSet generate_measurements(const NetworkTopology& topo, const ChannelParams& ch,
                                     std::uint64_t seed) {
  ch.validate();
  MeasurementSet out;
  out.items.reserve(2 * topo.edges.size());
  Rng rng(seed);
  const double kappa = ch.sigma_aoa_rad > 0 ? 1.0 / (ch.sigma_aoa_rad * ch.sigma_aoa_rad) : 0.0;

  auto directed = [&](int from, int to) {
    const Vec2 d = topo.positions[from] - topo.positions[to];
    EdgeMeasurement m;
    m.from = from;
    m.to = to;
    m.rss_dbm = ch.rss_mean_dbm(d.norm());
    if (ch.sigma_rss_db > 0) m.rss_dbm += ch.sigma_rss_db * rng.gaussian();
    double bearing = std::atan2(d.y(), d.x());
    if (ch.sigma_aoa_rad > 0) bearing += rng.von_mises(kappa);
    if (bearing >= M_PI) bearing -= 2 * M_PI;
    if (bearing < -M_PI) bearing += 2 * M_PI;
    m.aoa_rad = bearing;
    m.range_m = ch.range_from_rss(m.rss_dbm);
    out.items.push_back(m);
  };
  for (const auto& [i, j] : topo.edges) {
    directed(i, j);
    directed(j, i);
  }
  return out;
}

}  // namespace netloc
