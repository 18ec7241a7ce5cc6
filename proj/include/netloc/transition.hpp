#pragma once

#include <vector>

#include "netloc/efim.hpp"
#include "netloc/types.hpp"

namespace netloc {

enum class TransitionMode {
  AgentsOnly,  // agent-agent blocks only, size N_a
  Extended,    // agents + absorbing anchors (identity rows), size N_a + N_b
  Auxiliary    // anchors demoted to agents, size N_a + N_b
};

/// One-step pseudo-transition operator: blocks D_i^{-1} J_ij on agent
/// rows. Rows are matrix-valued analogues of transition probabilities:
/// each agent row sums to the identity over the node's full neighborhood.
struct TransitionOperator {
  TransitionMode mode = TransitionMode::AgentsOnly;
  int n_agents = 0;
  int n_anchors = 0;
  int antennas = 1;
  // rows[i]: sorted (column, 2x2 block); excludes the zero blocks.
  std::vector<std::vector<std::pair<int, Mat2>>> rows;
  std::vector<Mat2> npi;  // D_v for every node of the operator

  int dim() const {
    return mode == TransitionMode::AgentsOnly ? n_agents : n_agents + n_anchors;
  }
  MatrixXd dense() const;
  SpMat sparse() const;
};

/// Builds the operator in the requested mode. Throws SingularMatrixError
/// if a node's NPI is singular (isolated node, or degenerate range-only
/// neighborhoods).
TransitionOperator transition_operator(const InformationGraph& g, TransitionMode mode);

/// n-step pseudo-transition blocks via repeated multiplication.
BlockMatrix pseudo_transition_power(const TransitionOperator& op, int n);

}  // namespace netloc
