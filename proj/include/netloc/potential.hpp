#pragma once

#include <memory>
#include <span>
#include <vector>

#include "netloc/transition.hpp"

namespace netloc {

/// Matrix-valued random-walk potential over node pairs of an anchor-free
/// network:
///   P_{a,b} = sum_{p>=0} ( T_aa^(p) D_a^{-1} D_b - T_ab^(p) ).
/// Diagonal blocks vanish identically; in lattice interiors the blocks
/// depend only on the displacement and grow logarithmically with it.
struct PotentialKernel {
  int n = 0;
  MatrixXd blocks;        // 2n x 2n
  std::vector<Mat2> npi;  // D_a of the auxiliary network
  int antennas = 1;

  Mat2 block(int a, int b) const { return blocks.block<2, 2>(2 * a, 2 * b); }
};

/// Evaluates the potential via the fundamental-matrix closed form: with
/// W the rank-2 limit projector of the auxiliary operator, solve
/// (I - T + W) X = I and read P_{a,b} = X_aa D_a^{-1} D_b - X_ab.
/// Range-only networks (single antenna) have a three-dimensional null
/// space and are not supported on this path.
PotentialKernel potential_kernel_finite(const TransitionOperator& aux);

/// First-passage blocks toward a target set, all sources at once:
/// row k holds F_S(k, j) for each target j. Reference route via the
/// first-step linear system (absorbing boundary on S).
MatrixXd hitting_by_linear_solve(const TransitionOperator& op, std::span<const int> targets);

struct HittingSet {
  int source = 0;
  std::vector<int> targets;  // sorted, includes the source
  MatrixXd blocks;           // 2|S| x 2|S|, F(k,l) over the restricted set

  Mat2 block(int m, int n) const { return blocks.block<2, 2>(2 * m, 2 * n); }
  Mat2 self() const;  // F(source, source)
  int source_slot() const;
};

/// Hitting pseudo-probabilities on a restricted set from the restricted
/// potential kernel:
///   F = I + P^{-1} - P^{-1} Q (Q^T D P^{-1} Q)^{-1} Q^T D P^{-1}.
/// `equal_npi` selects the simplified branch valid when all NPI blocks
/// coincide (lattice interiors), where the D factors cancel.
MatrixXd hitting_from_restricted(const MatrixXd& p_restricted, std::span<const Mat2> npi,
                                 bool equal_npi = false);

/// Convenience over a materialized kernel; targets default to the
/// source plus every anchor (indices n_agents..n_nodes-1 of `kernel`).
HittingSet hitting_from_potential(const PotentialKernel& kernel, int source,
                                  std::span<const int> targets);

/// Equivalent information routed from the anchors: D_i sum_j F(i, j).
Mat2 efim_via_routing(const HittingSet& hit, const Mat2& npi_source);

/// Potential-kernel route evaluated per agent with the anchor-block
/// inverse computed once per network and reused (partitioned inverse).
/// Backed by a sparse grounded factorization with selected-entry
/// extraction; never materializes the full kernel.
class PotentialRouteEvaluator {
 public:
  explicit PotentialRouteEvaluator(const InformationGraph& g);
  ~PotentialRouteEvaluator();
  PotentialRouteEvaluator(PotentialRouteEvaluator&&) noexcept;

  /// Blocks [F_ii, F(i,anchor_0), ...]: 2 x 2(N_b + 1).
  MatrixXd hitting_row(int agent) const;
  Mat2 hitting_self(int agent) const;
  Mat2 efim_routing(int agent) const;
  /// sum_i tr( (D_i (I - F_ii))^{-1} )
  double objective() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Average-SPEB network objective, naive route: dense inversion of each
/// sample's EFIM.
double naive_network_objective(std::span<const NetworkTopology> samples,
                               const RadioParams& radio);

/// Same objective through the potential-kernel route.
double fast_network_objective(std::span<const NetworkTopology> samples,
                              const RadioParams& radio);

}  // namespace netloc
