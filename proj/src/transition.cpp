#include "netloc/transition.hpp"

#include <algorithm>

namespace netloc {

MatrixXd TransitionOperator::dense() const {
  const int n = dim();
  MatrixXd m = MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, blk] : rows[i]) m.block<2, 2>(2 * i, 2 * j) = blk;
  return m;
}

SpMat TransitionOperator::sparse() const {
  const int n = dim();
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i)
    for (const auto& [j, blk] : rows[i])
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) trip.emplace_back(2 * i + a, 2 * j + b, blk(a, b));
  SpMat s(2 * n, 2 * n);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

TransitionOperator transition_operator(const InformationGraph& g, TransitionMode mode) {
  TransitionOperator op;
  op.mode = mode;
  op.n_agents = g.n_agents;
  op.n_anchors = g.n_anchors;
  op.antennas = g.antennas;
  const int n = op.dim();
  op.rows.resize(n);
  op.npi.assign(g.npi.begin(), g.npi.begin() + n);

  // rows that walk: agents always; anchors too in auxiliary mode
  const int walking = mode == TransitionMode::Auxiliary ? n : std::min(n, g.n_agents);
  for (int i = 0; i < walking; ++i) {
    Eigen::FullPivLU<Mat2> lu(g.npi[i]);
    if (!lu.isInvertible())
      throw SingularMatrixError("transition_operator: singular NPI at node " + std::to_string(i));
    const Mat2 dinv = lu.inverse();
    auto& row = op.rows[i];
    for (const auto& [j, e] : g.adj[i]) {
      if (j >= n) continue;  // anchor columns absent in agents-only mode
      row.emplace_back(j, Mat2(dinv * g.link[e]));
    }
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  if (mode == TransitionMode::Extended) {
    for (int i = g.n_agents; i < n; ++i) op.rows[i].emplace_back(i, Mat2::Identity());
  }
  return op;
}

BlockMatrix pseudo_transition_power(const TransitionOperator& op, int n) {
  if (n < 1) throw std::invalid_argument("pseudo_transition_power: n must be >= 1");
  const SpMat t = op.sparse();
  MatrixXd acc = op.dense();
  for (int k = 1; k < n; ++k) acc = t * acc;
  return BlockMatrix(std::move(acc));
}

}  // namespace netloc
