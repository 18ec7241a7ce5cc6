#pragma once

#include <span>
#include <vector>

#include "netloc/measurements.hpp"
#include "netloc/topology.hpp"

namespace netloc {

struct EstimatorState {
  int iterations = 0;
  std::vector<Vec2> estimates;   // indexed by topology node id (anchors hold truth)
  std::vector<bool> localized;   // false for unreachable agents (outage)
  std::vector<int> hop;          // anchor hop count, -1 if unreachable
};

/// Iterative approximate maximum-likelihood estimator: each pairwise
/// likelihood is Gaussianized in the rotated range/bearing frame, the
/// variance estimates are refreshed from the previous iterate, and the
/// Gaussian-field linear system is solved centrally per iteration.
/// Iteration 1 seeds the variances with the measured ranges.
EstimatorState aml_estimate(const MeasurementSet& meas, const NetworkTopology& topo,
                            const ChannelParams& ch, int iters = 10);

/// Layer-by-layer estimator: hop-n agents solve a 2x2 system against
/// hop-(n-1) neighbors treated as virtual anchors, variances frozen at
/// their initial values.
EstimatorState sequential_estimate(const MeasurementSet& meas, const NetworkTopology& topo,
                                   const ChannelParams& ch);

/// One agent-snapshot record for the binned error curves.
struct MsePoint {
  double distance = 0.0;  // to the nearest anchor (true positions)
  double sq_error = 0.0;
  double speb = 0.0;
  bool localized = true;
};

struct MseBinRow {
  double center = 0.0;
  double mse = 0.0;
  double speb_avg = 0.0;
  int count = 0;
  double outage_rate = 0.0;
  double mse_stderr = 0.0;  // Monte Carlo standard error of the mse
};

/// Bins points by distance; unlocalized points count toward the outage
/// rate and are excluded from the averages. Empty bins are omitted.
std::vector<MseBinRow> mse_curve(std::span<const MsePoint> points, double bin_width_m);

}  // namespace netloc
