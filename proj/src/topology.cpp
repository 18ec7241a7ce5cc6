#include "netloc/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "netloc/rng.hpp"

namespace netloc {

double RadioParams::max_range() const {
  if (rmax_override_m) return *rmax_override_m;
  return std::pow(10.0, (tx_snr_1m_db - rx_sensitivity_db) / (10.0 * path_loss_exponent));
}

void RadioParams::validate() const {
  if (path_loss_exponent <= 2.0)
    throw std::invalid_argument("RadioParams: path_loss_exponent must exceed 2");
  if (bandwidth_hz <= 0 || carrier_hz <= 0)
    throw std::invalid_argument("RadioParams: bandwidth and carrier must be positive");
  if (antennas < 1) throw std::invalid_argument("RadioParams: antennas must be >= 1");
  if (ranging_coeff <= 0 || ref_ranging_info <= 0)
    throw std::invalid_argument("RadioParams: information scale must be positive");
  if (rmax_override_m && *rmax_override_m <= 0)
    throw std::invalid_argument("RadioParams: rmax override must be positive");
}

bool NetworkTopology::is_anchor(int v) const {
  return std::find(anchor_ids.begin(), anchor_ids.end(), v) != anchor_ids.end();
}

std::vector<std::vector<int>> NetworkTopology::adjacency() const {
  std::vector<std::vector<int>> adj(positions.size());
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

NetworkTopology build_lattice_disk(double spacing_m, double diameter_m) {
  if (spacing_m <= 0 || diameter_m <= 0)
    throw std::invalid_argument("build_lattice_disk: spacing and diameter must be positive");
  NetworkTopology t;
  t.net_diameter = diameter_m;
  t.lattice_spacing = spacing_m;
  const double r = diameter_m / 2.0;
  const int kmax = static_cast<int>(std::floor(r / spacing_m));
  for (int k = -kmax; k <= kmax; ++k)
    for (int l = -kmax; l <= kmax; ++l) {
      const Vec2 p(spacing_m * k, spacing_m * l);
      if (p.norm() <= r + 1e-9 * spacing_m) {
        t.agent_ids.push_back(static_cast<int>(t.positions.size()));
        t.positions.push_back(p);
      }
    }
  return t;
}

namespace {

bool inside_hole(const Vec2& p, const std::vector<Hole>& holes) {
  for (const auto& h : holes)
    if ((p - h.center).norm() < h.radius) return true;
  return false;
}

}  // namespace

NetworkTopology build_stochastic_disk(double density_per_m2, double diameter_m,
                                      const std::vector<Hole>& holes, std::uint64_t seed) {
  if (density_per_m2 <= 0 || diameter_m <= 0)
    throw std::invalid_argument("build_stochastic_disk: density and diameter must be positive");
  const double r = diameter_m / 2.0;
  double area = M_PI * r * r;
  for (const auto& h : holes) {
    if (h.center.norm() + h.radius > r + 1e-9)
      throw std::invalid_argument("build_stochastic_disk: hole outside the disk");
    area -= M_PI * h.radius * h.radius;
  }
  if (area <= 0) throw std::invalid_argument("build_stochastic_disk: empty region");

  const int n = static_cast<int>(std::floor(density_per_m2 * area));
  NetworkTopology t;
  t.net_diameter = diameter_m;
  t.holes = holes;
  t.positions.reserve(n);
  Rng rng(seed);
  while (static_cast<int>(t.positions.size()) < n) {
    // rejection sampling keeps the law exactly uniform on the punctured disk
    const Vec2 p(rng.uniform(-r, r), rng.uniform(-r, r));
    if (p.norm() > r || inside_hole(p, holes)) continue;
    t.agent_ids.push_back(static_cast<int>(t.positions.size()));
    t.positions.push_back(p);
  }
  return t;
}

namespace {

// Re-label the nearest node as an anchor when within snap_radius, else
// insert a new node at the exact position.
void add_anchor(NetworkTopology& t, const Vec2& pos, double snap_radius, double* max_snap) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < t.node_count(); ++v) {
    const double d = (t.positions[v] - pos).norm();
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  if (best >= 0 && best_d <= snap_radius) {
    auto it = std::find(t.agent_ids.begin(), t.agent_ids.end(), best);
    if (it != t.agent_ids.end()) {
      t.agent_ids.erase(it);
      t.anchor_ids.push_back(best);
      if (max_snap) *max_snap = std::max(*max_snap, best_d);
      return;
    }
    if (std::find(t.anchor_ids.begin(), t.anchor_ids.end(), best) != t.anchor_ids.end())
      return;  // already an anchor at this spot
  }
  t.anchor_ids.push_back(t.node_count());
  t.positions.push_back(pos);
}

}  // namespace

NetworkTopology place_anchors(NetworkTopology topo, const AnchorScheme& scheme,
                              double* max_snap_m) {
  if (max_snap_m) *max_snap_m = 0.0;
  const double r = topo.net_diameter / 2.0;
  const double snap = topo.lattice_spacing > 0 ? topo.lattice_spacing / 2.0 : 0.0;

  switch (scheme.kind) {
    case AnchorScheme::Kind::SingleCenter:
      add_anchor(topo, Vec2::Zero(), snap, max_snap_m);
      break;
    case AnchorScheme::Kind::LatticeUniform: {
      if (scheme.anchor_density <= 0)
        throw std::invalid_argument("place_anchors: anchor density must be positive");
      const double pitch = 1.0 / std::sqrt(scheme.anchor_density);
      const int kmax = static_cast<int>(std::floor(r / pitch));
      for (int k = -kmax; k <= kmax; ++k)
        for (int l = -kmax; l <= kmax; ++l) {
          const Vec2 p(pitch * k, pitch * l);
          if (p.norm() <= r + 1e-9) add_anchor(topo, p, snap, max_snap_m);
        }
      break;
    }
    case AnchorScheme::Kind::Binomial: {
      if (scheme.anchor_density <= 0)
        throw std::invalid_argument("place_anchors: anchor density must be positive");
      double area = M_PI * r * r;
      for (const auto& h : topo.holes) area -= M_PI * h.radius * h.radius;
      const int n = static_cast<int>(std::floor(scheme.anchor_density * area));
      Rng rng(scheme.seed);
      int placed = 0;
      while (placed < n) {
        const Vec2 p(rng.uniform(-r, r), rng.uniform(-r, r));
        if (p.norm() > r || inside_hole(p, topo.holes)) continue;
        add_anchor(topo, p, snap, max_snap_m);
        ++placed;
      }
      break;
    }
    case AnchorScheme::Kind::Explicit:
    case AnchorScheme::Kind::ConcentricOffsets:
      for (const auto& p : scheme.points) {
        if (p.norm() > r + 1e-9)
          throw std::invalid_argument("place_anchors: anchor position outside the region");
        add_anchor(topo, p, snap, max_snap_m);
      }
      break;
  }
  return topo;
}

NetworkTopology connect_by_link_budget(NetworkTopology topo, const RadioParams& radio) {
  radio.validate();
  topo.max_range = radio.max_range();
  topo.edges.clear();
  const int n = topo.node_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (topo.distance(i, j) <= topo.max_range) topo.edges.emplace_back(i, j);

  // breadth-first connectivity over all nodes
  topo.connected = false;
  if (n > 0) {
    const auto adj = topo.adjacency();
    std::vector<char> seen(n, 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop_front();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          q.push_back(w);
        }
    }
    topo.connected = (count == n);
  }
  return topo;
}

std::vector<int> interior_agents(const NetworkTopology& topo, double eps) {
  if (eps <= 0 || eps >= 1) throw std::invalid_argument("interior_agents: eps must be in (0,1)");
  const double rmax = (1.0 - eps) * topo.net_diameter / 2.0;
  std::vector<int> out;
  for (int a : topo.agent_ids)
    if (topo.positions[a].norm() < rmax) out.push_back(a);
  return out;
}

}  // namespace netloc
