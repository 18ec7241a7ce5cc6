#pragma once

#include <cstdint>
#include <vector>

#include "netloc/topology.hpp"
#include "netloc/types.hpp"

namespace netloc {

/// RSS/AOA channel of the estimator experiments ("park" scenario).
struct ChannelParams {
  double tx_power_dbm = 5.0;                     // P_T
  double ref_loss_db = 31.0;                     // L_0 at d_0
  double path_loss_exponent = 3.69;
  double ref_dist_m = 1.0;                       // d_0
  double sigma_rss_db = 1.42;                    // shadowing std
  double sigma_aoa_rad = 5.0 * M_PI / 180.0;     // bearing noise std
  double max_range_m = 43.0;

  void validate() const;
  double rss_mean_dbm(double dist_m) const;      // P_T - L0 - 10 gamma log10(d/d0)
  double range_from_rss(double rss_dbm) const;   // inverts the mean model
};

/// One directed measurement: node `to` observes node `from`, estimating
/// the displacement p_from - p_to through a range and a bearing.
struct EdgeMeasurement {
  int from = 0;
  int to = 0;
  double rss_dbm = 0.0;
  double aoa_rad = 0.0;      // measured bearing of p_from - p_to
  double range_m = 0.0;      // derived from rss
  Vec2 displacement() const { return range_m * unit_vec(aoa_rad); }
};

struct MeasurementSet {
  std::vector<EdgeMeasurement> items;  // two directed entries per link
};

/// Gaussian shadowing on RSS, von Mises bearing errors with
/// concentration 1/sigma_aoa^2; deterministic per seed.
MeasurementSet generate_measurements(const NetworkTopology& topo, const ChannelParams& ch,
                                     std::uint64_t seed);

}  // namespace netloc
