#pragma once

#include <memory>
#include <vector>

#include "netloc/link_model.hpp"
#include "netloc/topology.hpp"
#include "netloc/types.hpp"

namespace netloc {

/// Link-information view of a topology with nodes re-indexed so that
/// agents come first (0..n_agents-1) followed by anchors. All EFIM and
/// random-walk machinery operates on this fixed indexing.
struct InformationGraph {
  int n_agents = 0;
  int n_anchors = 0;
  int antennas = 1;
  std::vector<Vec2> positions;                            // graph order
  std::vector<std::pair<int, int>> edges;                 // i < j, graph order
  std::vector<Mat2> link;                                 // J_ij per edge
  std::vector<Mat2> npi;                                  // D_v = sum of J over incident links
  std::vector<std::vector<std::pair<int, int>>> adj;      // node -> (neighbor, edge idx)
  std::vector<int> node_to_topo;                          // graph index -> topology index

  int n_nodes() const { return n_agents + n_anchors; }
  bool is_anchor(int v) const { return v >= n_agents; }
  bool agents_connected_to_anchor() const;  // every agent reaches an anchor
};

InformationGraph build_information_graph(const NetworkTopology& topo, const RadioParams& radio);

enum class EfimMode { Original, Auxiliary };

/// Network EFIM as a dense block matrix: block-diagonal NPI minus the
/// link terms on off-diagonal agent-agent blocks (Original, 2 N_a) or
/// over all nodes with anchors demoted to agents (Auxiliary, singular,
/// translation null space).
BlockMatrix assemble_efim(const InformationGraph& g, EfimMode mode);
SpMat assemble_efim_sparse(const InformationGraph& g, EfimMode mode);

/// Per-agent equivalent information via factorization of the network
/// EFIM: inverse of the agent's 2x2 block of the inverse. Falls back to
/// per-agent generalized Schur complements when the network EFIM is
/// rank-deficient (range-only single-anchor networks), where the inverse
/// does not exist but the Schur complement still does.
class EfimSolver {
 public:
  explicit EfimSolver(const InformationGraph& g, bool force_dense = false);
  ~EfimSolver();
  EfimSolver(EfimSolver&&) noexcept;
  EfimSolver& operator=(EfimSolver&&) noexcept;

  Mat2 agent_efim(int agent) const;
  bool rank_deficient() const;
  /// Columns of J_e^{-1} for the agent (2N_a x 2); only valid when not
  /// rank deficient.
  MatrixXd inverse_columns(int agent) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience around EfimSolver.
Mat2 agent_efim_direct(const InformationGraph& g, int agent);

/// Localization bounds derived from a 2x2 EFIM. Rank-deficient input uses
/// the pseudo-inverse; bounds along null directions are infinite.
struct AgentBound {
  Mat2 efim = Mat2::Zero();
  double speb = 0.0;          // +inf when rank deficient
  double ellipse_major = 0.0; // semi-axes are eigenvalue^{-1/2}
  double ellipse_minor = 0.0;
  double ellipse_angle = 0.0; // orientation of the major axis

  /// Directional bound u^T J^+ u, +inf when u has a null-space component.
  double dpeb(const Vec2& u) const;

 private:
  friend AgentBound performance_metrics(const Mat2&);
  Vec2 eigvals_ = Vec2::Zero();
  Mat2 eigvecs_ = Mat2::Identity();
};

/// Relative eigenvalue threshold for rank decisions.
inline constexpr double kRankTol = 1e-10;

AgentBound performance_metrics(const Mat2& efim_2x2);

}  // namespace netloc
