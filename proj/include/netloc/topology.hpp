#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "netloc/types.hpp"

namespace netloc {

/// Radio and waveform constants of the bound model.
struct RadioParams {
  double path_loss_exponent = 3.0;  // gamma, must exceed 2
  double bandwidth_hz = 10e6;       // beta
  double carrier_hz = 2e9;          // f_c
  double ranging_coeff = 1.0;       // zeta, per-link scale (global)
  double tx_snr_1m_db = 40.0;       // SNR measured 1 m from the transmitter
  double rx_sensitivity_db = -15.0;
  int antennas = 3;                 // N_t
  // Array aperture factor under the uniform-orientation assumption;
  // default is r^2/2 for a 0.3 m diameter circular array. Forced to 0
  // when antennas == 1 (no bearing information).
  double aperture_factor = 0.15 * 0.15 / 2.0;
  // Ranging information of a 1 m link per unit ranging_coeff. The scaling
  // laws are invariant to this constant; it only conditions the numbers.
  double ref_ranging_info = 1.0;
  std::optional<double> rmax_override_m;

  double max_range() const;  // meters, from the link budget (or override)
  double bearing_aperture() const { return antennas == 1 ? 0.0 : aperture_factor; }
  void validate() const;  // throws std::invalid_argument
};

struct Hole {
  Vec2 center;
  double radius = 0.0;
};

/// Node positions, agent/anchor partition and connectivity. Immutable by
/// convention once built: the builders below return new values.
struct NetworkTopology {
  std::vector<Vec2> positions;
  std::vector<int> agent_ids;
  std::vector<int> anchor_ids;
  std::vector<std::pair<int, int>> edges;  // undirected, i < j
  double net_diameter = 0.0;               // declared region diameter (m)
  double max_range = 0.0;                  // link budget range used for edges (m)
  double lattice_spacing = 0.0;            // 0 for stochastic layouts
  std::vector<Hole> holes;
  bool connected = false;

  int node_count() const { return static_cast<int>(positions.size()); }
  bool is_anchor(int v) const;
  std::vector<std::vector<int>> adjacency() const;
  double distance(int i, int j) const { return (positions[i] - positions[j]).norm(); }
};

struct AnchorScheme {
  enum class Kind { SingleCenter, LatticeUniform, Binomial, Explicit, ConcentricOffsets };
  Kind kind = Kind::SingleCenter;
  double anchor_density = 0.0;  // per m^2, lattice-uniform and binomial
  std::uint64_t seed = 0;       // binomial
  std::vector<Vec2> points;     // explicit positions or concentric offsets

  static AnchorScheme single_center() { return {Kind::SingleCenter, 0, 0, {}}; }
  static AnchorScheme lattice_uniform(double density) {
    return {Kind::LatticeUniform, density, 0, {}};
  }
  static AnchorScheme binomial(double density, std::uint64_t seed) {
    return {Kind::Binomial, density, seed, {}};
  }
  static AnchorScheme explicit_points(std::vector<Vec2> pts) {
    return {Kind::Explicit, 0, 0, std::move(pts)};
  }
  static AnchorScheme concentric_offsets(std::vector<Vec2> offs) {
    return {Kind::ConcentricOffsets, 0, 0, std::move(offs)};
  }
};

/// All integer lattice points scaled by `spacing` within the disk of the
/// given diameter (boundary inclusive) become agents. Edges stay empty
/// until connect_by_link_budget.
NetworkTopology build_lattice_disk(double spacing_m, double diameter_m);

/// Binomial point process on the disk minus holes: floor(density * area)
/// points drawn uniformly by rejection, deterministic per seed.
NetworkTopology build_stochastic_disk(double density_per_m2, double diameter_m,
                                      const std::vector<Hole>& holes, std::uint64_t seed);

/// Re-labels or inserts anchor nodes according to the scheme. On lattice
/// layouts a requested anchor position snaps to the nearest node when one
/// lies within spacing/2; `max_snap_m` (optional) reports the largest snap.
NetworkTopology place_anchors(NetworkTopology topo, const AnchorScheme& scheme,
                              double* max_snap_m = nullptr);

/// Populates edges with all pairs within R_max (inclusive) and flags
/// connectivity. Disconnection is reported, not fatal.
NetworkTopology connect_by_link_budget(NetworkTopology topo, const RadioParams& radio);

/// Agents with ||p_i|| < (1 - eps) * D_net / 2.
std::vector<int> interior_agents(const NetworkTopology& topo, double eps);

}  // namespace netloc
