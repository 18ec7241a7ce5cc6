#include "netloc/estimators.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace netloc {

namespace {

constexpr double kSigmaFloor = 1e-9;  // zero-noise runs keep a consistent system

Mat2 edge_precision(double bearing, double sigma_r, double sigma_t) {
  const Mat2 u = rotation(bearing);
  Mat2 lam = Mat2::Zero();
  lam(0, 0) = 1.0 / std::max(sigma_r, kSigmaFloor);
  lam(1, 1) = 1.0 / std::max(sigma_t, kSigmaFloor);
  lam = lam.cwiseProduct(lam);
  return u * lam * u.transpose();
}

std::vector<int> hop_layers(const NetworkTopology& topo) {
  std::vector<int> hop(topo.node_count(), -1);
  std::deque<int> q;
  for (int b : topo.anchor_ids) {
    hop[b] = 0;
    q.push_back(b);
  }
  const auto adj = topo.adjacency();
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (hop[w] < 0) {
        hop[w] = hop[v] + 1;
        q.push_back(w);
      }
  }
  return hop;
}

}  // namespace

EstimatorState aml_estimate(const MeasurementSet& meas, const NetworkTopology& topo,
                            const ChannelParams& ch, int iters) {
  if (iters < 1) throw std::invalid_argument("aml_estimate: iters must be >= 1");
  if (topo.anchor_ids.empty()) throw SingularMatrixError("aml_estimate: no anchors");

  EstimatorState st;
  st.hop = hop_layers(topo);
  st.estimates.resize(topo.node_count(), Vec2::Zero());
  st.localized.assign(topo.node_count(), false);
  for (int b : topo.anchor_ids) st.estimates[b] = topo.positions[b];

  // only agents with an anchored path enter the field
  std::vector<int> slot(topo.node_count(), -1);
  std::vector<int> active;
  for (int a : topo.agent_ids)
    if (st.hop[a] >= 0) {
      slot[a] = static_cast<int>(active.size());
      active.push_back(a);
    }
  const int n = static_cast<int>(active.size());
  if (n == 0) return st;

  const double range_factor = std::log(10.0) * ch.sigma_rss_db / (10.0 * ch.path_loss_exponent);
  VectorXd x;  // current estimate, 2n

  for (int iter = 1; iter <= iters; ++iter) {
    std::vector<Eigen::Triplet<double>> trip;
    VectorXd b = VectorXd::Zero(2 * n);
    auto add_block = [&](int bi, int bj, const Mat2& m) {
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) trip.emplace_back(2 * bi + p, 2 * bj + q, m(p, q));
    };

    for (const auto& m : meas.items) {
      const int f = m.from, t = m.to;
      const bool f_agent = slot[f] >= 0, t_agent = slot[t] >= 0;
      if ((!f_agent && !topo.is_anchor(f)) || (!t_agent && !topo.is_anchor(t)))
        continue;  // unreachable endpoint

      double link_len = m.range_m;
      if (iter > 1) {
        const Vec2 pf = f_agent ? Vec2(x.segment<2>(2 * slot[f])) : topo.positions[f];
        const Vec2 pt = t_agent ? Vec2(x.segment<2>(2 * slot[t])) : topo.positions[t];
        link_len = (pf - pt).norm();
      }
      const Mat2 omega =
          edge_precision(m.aoa_rad, range_factor * link_len, ch.sigma_aoa_rad * link_len);
      const Vec2 dhat = m.displacement();

      if (f_agent && t_agent) {
        add_block(slot[f], slot[f], omega);
        add_block(slot[t], slot[t], omega);
        add_block(slot[f], slot[t], -omega);
        add_block(slot[t], slot[f], -omega);
        b.segment<2>(2 * slot[f]) += omega * dhat;
        b.segment<2>(2 * slot[t]) -= omega * dhat;
      } else if (f_agent) {  // t is an anchor
        add_block(slot[f], slot[f], omega);
        b.segment<2>(2 * slot[f]) += omega * (topo.positions[t] + dhat);
      } else if (t_agent) {  // f is an anchor
        add_block(slot[t], slot[t], omega);
        b.segment<2>(2 * slot[t]) += omega * (topo.positions[f] - dhat);
      }
    }

    SpMat h(2 * n, 2 * n);
    h.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(h);
    if (ldlt.info() != Eigen::Success)
      throw SingularMatrixError("aml_estimate: singular precision matrix");
    x = ldlt.solve(b);
    st.iterations = iter;
  }

  for (int a : active) {
    st.estimates[a] = x.segment<2>(2 * slot[a]);
    st.localized[a] = true;
  }
  return st;
}

EstimatorState sequential_estimate(const MeasurementSet& meas, const NetworkTopology& topo,
                                   const ChannelParams& ch) {
  if (topo.anchor_ids.empty()) throw SingularMatrixError("sequential_estimate: no anchors");
  EstimatorState st;
  st.iterations = 1;
  st.hop = hop_layers(topo);
  st.estimates.resize(topo.node_count(), Vec2::Zero());
  st.localized.assign(topo.node_count(), false);
  for (int b : topo.anchor_ids) {
    st.estimates[b] = topo.positions[b];
    st.localized[b] = true;
  }

  // measurement lookup for the directed pair (i estimated from j)
  std::map<std::pair<int, int>, const EdgeMeasurement*> by_pair;
  for (const auto& m : meas.items) by_pair[{m.from, m.to}] = &m;
  const auto adj = topo.adjacency();
  const double range_factor = std::log(10.0) * ch.sigma_rss_db / (10.0 * ch.path_loss_exponent);

  int max_hop = 0;
  for (int h : st.hop) max_hop = std::max(max_hop, h);

  for (int layer = 1; layer <= max_hop; ++layer) {
    for (int a : topo.agent_ids) {
      if (st.hop[a] != layer) continue;
      Mat2 p = Mat2::Zero();
      Vec2 h = Vec2::Zero();
      for (int j : adj[a]) {
        if (st.hop[j] != layer - 1 || !st.localized[j]) continue;  // previous layer only
        const auto it = by_pair.find({a, j});
        if (it == by_pair.end()) continue;
        const EdgeMeasurement& m = *it->second;
        const Mat2 omega = edge_precision(m.aoa_rad, range_factor * m.range_m,
                                          ch.sigma_aoa_rad * m.range_m);
        p += omega;
        h += omega * (st.estimates[j] + m.displacement());
      }
      Eigen::SelfAdjointEigenSolver<Mat2> es(p);
      if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(es.eigenvalues().maxCoeff(), 1.0))
        continue;  // underdetermined: flagged unlocalized
      st.estimates[a] = p.inverse() * h;
      st.localized[a] = true;
    }
  }
  return st;
}

std::vector<MseBinRow> mse_curve(std::span<const MsePoint> points, double bin_width_m) {
  if (bin_width_m <= 0) throw std::invalid_argument("mse_curve: bin width must be positive");
  std::map<int, std::vector<const MsePoint*>> bins;
  for (const auto& p : points) bins[static_cast<int>(std::floor(p.distance / bin_width_m))].push_back(&p);

  std::vector<MseBinRow> rows;
  for (const auto& [k, pts] : bins) {
    MseBinRow r;
    r.center = (k + 0.5) * bin_width_m;
    int n_loc = 0;
    double sum_sq = 0, sum_speb = 0, sum_sq2 = 0;
    for (const auto* p : pts) {
      if (!p->localized) continue;
      ++n_loc;
      sum_sq += p->sq_error;
      sum_sq2 += p->sq_error * p->sq_error;
      sum_speb += p->speb;
    }
    r.count = n_loc;
    r.outage_rate = 1.0 - static_cast<double>(n_loc) / static_cast<double>(pts.size());
    if (n_loc == 0) continue;  // omitted with the outage noted upstream
    r.mse = sum_sq / n_loc;
    r.speb_avg = sum_speb / n_loc;
    if (n_loc > 1) {
      const double var = std::max(0.0, sum_sq2 / n_loc - r.mse * r.mse);
      r.mse_stderr = std::sqrt(var / n_loc);
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace netloc
