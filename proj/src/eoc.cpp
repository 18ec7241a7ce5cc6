#include "netloc/eoc.hpp"

#include <limits>

namespace netloc {

EocDecomposition eoc_decomposition(const TransitionOperator& agents_only, int agent, double tol,
                                   int max_n, const Mat2* exact_agent_efim) {
  if (agents_only.mode != TransitionMode::AgentsOnly)
    throw std::invalid_argument("eoc_decomposition: expected the agents-only operator");
  if (agent < 0 || agent >= agents_only.n_agents)
    throw std::invalid_argument("eoc_decomposition: agent index out of range");

  EocDecomposition out;
  out.npi = agents_only.npi[agent];

  // propagate the agent's block row: R <- R T, accumulating the (agent)
  // column block each step
  // The diagonal of T vanishes (no self loops) and near-bipartite
  // neighborhoods alternate, so the stop rule requires two consecutive
  // increments below tolerance.
  const int n = agents_only.n_agents;
  MatrixXd row = MatrixXd::Zero(2, 2 * n);
  row.block<2, 2>(0, 2 * agent) = Mat2::Identity();
  Mat2 delta = Mat2::Zero();
  double inc = 0.0, prev_inc = std::numeric_limits<double>::infinity();
  int steps = 0;
  for (steps = 1; steps <= max_n; ++steps) {
    MatrixXd next = MatrixXd::Zero(2, 2 * n);
    for (int i = 0; i < n; ++i) {
      const Mat2 ri = row.block<2, 2>(0, 2 * i);
      if (ri.cwiseAbs().maxCoeff() == 0.0) continue;
      for (const auto& [j, blk] : agents_only.rows[i]) next.block<2, 2>(0, 2 * j) += ri * blk;
    }
    row.swap(next);
    const Mat2 term = row.block<2, 2>(0, 2 * agent);
    delta += term;
    prev_inc = inc;
    inc = term.norm();
    if (steps >= 2 && inc < tol && prev_inc < tol) break;
  }
  out.delta = delta;
  out.truncation_n = std::min(steps, max_n);
  out.truncation_residual = inc;
  out.converged = inc < tol && prev_inc < tol;

  out.eoc = (Mat2::Identity() + delta).inverse();
  out.hitting = Mat2::Identity() - out.eoc;
  if (exact_agent_efim) {
    // EFIM_i = D_i (I + Delta)^{-1}  =>  Delta = EFIM_i^{-1} D_i - I
    out.delta_exact = Mat2(exact_agent_efim->inverse() * out.npi - Mat2::Identity());
  }
  return out;
}

EocDecomposition eoc_decomposition(const InformationGraph& g, int agent, double tol, int max_n) {
  const TransitionOperator t = transition_operator(g, TransitionMode::AgentsOnly);
  const Mat2 exact = agent_efim_direct(g, agent);
  return eoc_decomposition(t, agent, tol, max_n, &exact);
}

}  // namespace netloc
