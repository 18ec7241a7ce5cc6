#include "netloc/efim.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace netloc {

bool InformationGraph::agents_connected_to_anchor() const {
  if (n_anchors == 0) return false;
  std::vector<char> seen(n_nodes(), 0);
  std::deque<int> q;
  for (int v = n_agents; v < n_nodes(); ++v) {
    seen[v] = 1;
    q.push_back(v);
  }
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (const auto& [w, e] : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  for (int a = 0; a < n_agents; ++a)
    if (!seen[a]) return false;
  return true;
}

InformationGraph build_information_graph(const NetworkTopology& topo, const RadioParams& radio) {
  radio.validate();
  InformationGraph g;
  g.n_agents = static_cast<int>(topo.agent_ids.size());
  g.n_anchors = static_cast<int>(topo.anchor_ids.size());
  g.antennas = radio.antennas;

  std::vector<int> topo_to_node(topo.node_count(), -1);
  g.node_to_topo.reserve(g.n_nodes());
  for (int a : topo.agent_ids) {
    topo_to_node[a] = static_cast<int>(g.node_to_topo.size());
    g.node_to_topo.push_back(a);
  }
  for (int b : topo.anchor_ids) {
    topo_to_node[b] = static_cast<int>(g.node_to_topo.size());
    g.node_to_topo.push_back(b);
  }
  g.positions.resize(g.n_nodes());
  for (int v = 0; v < g.n_nodes(); ++v) g.positions[v] = topo.positions[g.node_to_topo[v]];

  g.npi.assign(g.n_nodes(), Mat2::Zero());
  g.adj.resize(g.n_nodes());
  for (const auto& [ti, tj] : topo.edges) {
    int i = topo_to_node[ti], j = topo_to_node[tj];
    if (i > j) std::swap(i, j);
    const LinkInformation li = link_information(radio, g.positions[i] - g.positions[j]);
    const int e = static_cast<int>(g.edges.size());
    g.edges.emplace_back(i, j);
    g.link.push_back(li.matrix);
    g.npi[i] += li.matrix;
    g.npi[j] += li.matrix;
    g.adj[i].emplace_back(j, e);
    g.adj[j].emplace_back(i, e);
  }
  return g;
}

BlockMatrix assemble_efim(const InformationGraph& g, EfimMode mode) {
  const int n = mode == EfimMode::Original ? g.n_agents : g.n_nodes();
  BlockMatrix m(n);
  for (int v = 0; v < n; ++v) m(v, v) = g.npi[v];
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& [i, j] = g.edges[e];
    if (j >= n) continue;  // anchor blocks absent in the original EFIM
    m(i, j) -= g.link[e];
    m(j, i) -= g.link[e];
  }
  return m;
}

SpMat assemble_efim_sparse(const InformationGraph& g, EfimMode mode) {
  const int n = mode == EfimMode::Original ? g.n_agents : g.n_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * (n + 2 * g.edges.size()));
  auto put = [&](int bi, int bj, const Mat2& m) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) trip.emplace_back(2 * bi + a, 2 * bj + b, m(a, b));
  };
  for (int v = 0; v < n; ++v) put(v, v, g.npi[v]);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& [i, j] = g.edges[e];
    if (j >= n) continue;
    put(i, j, -g.link[e]);
    put(j, i, -g.link[e]);
  }
  SpMat s(2 * n, 2 * n);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

namespace {
// Dense path below this node count, sparse factorization above.
constexpr int kSparseThreshold = 500;
}  // namespace

struct EfimSolver::Impl {
  const InformationGraph* g = nullptr;
  bool dense = true;
  bool deficient = false;
  Eigen::LDLT<MatrixXd> dense_ldlt;
  MatrixXd dense_efim;
  SpMat sparse_efim;
  Eigen::SimplicialLDLT<SpMat> sparse_ldlt;

  Mat2 block_of_inverse(int agent) const {
    MatrixXd rhs = MatrixXd::Zero(2 * g->n_agents, 2);
    rhs(2 * agent, 0) = 1.0;
    rhs(2 * agent + 1, 1) = 1.0;
    MatrixXd cols = dense ? dense_ldlt.solve(rhs) : MatrixXd(sparse_ldlt.solve(rhs));
    Mat2 out = cols.block<2, 2>(2 * agent, 0);
    return 0.5 * (out + out.transpose());
  }

  // Generalized Schur complement J_ii - J_ic J_cc^{-1} J_ci, valid when
  // the full EFIM is singular but the complement block is not.
  Mat2 generalized_schur(int agent) const {
    const int n = g->n_agents;
    std::vector<int> keep;  // agent indices except `agent`
    keep.reserve(n - 1);
    for (int v = 0; v < n; ++v)
      if (v != agent) keep.push_back(v);
    std::vector<int> pos(n, -1);
    for (std::size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<int>(k);

    std::vector<Eigen::Triplet<double>> trip;
    auto put = [&](int bi, int bj, const Mat2& m) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) trip.emplace_back(2 * bi + a, 2 * bj + b, m(a, b));
    };
    for (int v : keep) put(pos[v], pos[v], g->npi[v]);
    MatrixXd cross = MatrixXd::Zero(2 * (n - 1), 2);  // J_{c,i}
    for (std::size_t e = 0; e < g->edges.size(); ++e) {
      const auto& [i, j] = g->edges[e];
      if (j >= n) continue;
      if (i == agent && j != agent)
        cross.block<2, 2>(2 * pos[j], 0) = -g->link[e];
      else if (j == agent && i != agent)
        cross.block<2, 2>(2 * pos[i], 0) = -g->link[e];
      else if (i != agent && j != agent) {
        put(pos[i], pos[j], -g->link[e]);
        put(pos[j], pos[i], -g->link[e]);
      }
    }
    SpMat jcc(2 * (n - 1), 2 * (n - 1));
    jcc.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> ldlt(jcc);
    if (ldlt.info() != Eigen::Success)
      throw SingularMatrixError("agent_efim_direct: degenerate geometry (reduced EFIM singular)");
    const MatrixXd x = ldlt.solve(cross);
    Mat2 out = g->npi[agent] - cross.transpose() * x;
    return 0.5 * (out + out.transpose());
  }
};

EfimSolver::EfimSolver(const InformationGraph& g, bool force_dense) : impl_(new Impl) {
  impl_->g = &g;
  if (g.n_anchors == 0)
    throw SingularMatrixError("EfimSolver: network has no anchor (EFIM singular)");
  if (!g.agents_connected_to_anchor())
    throw SingularMatrixError("EfimSolver: network is disconnected from all anchors (EFIM singular)");

  impl_->dense = force_dense || g.n_nodes() <= kSparseThreshold;
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  if (impl_->dense) {
    impl_->dense_efim = assemble_efim(g, EfimMode::Original).matrix();
    impl_->dense_ldlt.compute(impl_->dense_efim);
    const VectorXd d = impl_->dense_ldlt.vectorD();
    dmin = d.minCoeff();
    dmax = d.maxCoeff();
  } else {
    impl_->sparse_efim = assemble_efim_sparse(g, EfimMode::Original);
    impl_->sparse_ldlt.compute(impl_->sparse_efim);
    if (impl_->sparse_ldlt.info() == Eigen::Success) {
      const VectorXd d = impl_->sparse_ldlt.vectorD();
      dmin = d.minCoeff();
      dmax = d.maxCoeff();
    } else {
      dmin = 0.0;
      dmax = 1.0;
    }
  }
  impl_->deficient = !(dmin > kRankTol * dmax);
}

EfimSolver::~EfimSolver() = default;
EfimSolver::EfimSolver(EfimSolver&&) noexcept = default;
EfimSolver& EfimSolver::operator=(EfimSolver&&) noexcept = default;

bool EfimSolver::rank_deficient() const { return impl_->deficient; }

Mat2 EfimSolver::agent_efim(int agent) const {
  if (agent < 0 || agent >= impl_->g->n_agents)
    throw std::invalid_argument("agent_efim: index out of range");
  if (impl_->deficient) return impl_->generalized_schur(agent);
  const Mat2 blk = impl_->block_of_inverse(agent);
  return blk.inverse();
}

MatrixXd EfimSolver::inverse_columns(int agent) const {
  if (impl_->deficient)
    throw SingularMatrixError("inverse_columns: network EFIM is rank deficient");
  MatrixXd rhs = MatrixXd::Zero(2 * impl_->g->n_agents, 2);
  rhs(2 * agent, 0) = 1.0;
  rhs(2 * agent + 1, 1) = 1.0;
  return impl_->dense ? MatrixXd(impl_->dense_ldlt.solve(rhs))
                      : MatrixXd(impl_->sparse_ldlt.solve(rhs));
}

Mat2 agent_efim_direct(const InformationGraph& g, int agent) {
  return EfimSolver(g).agent_efim(agent);
}

double AgentBound::dpeb(const Vec2& u) const {
  const double lmax = eigvals_.maxCoeff();
  double out = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double c = u.dot(eigvecs_.col(k));
    if (eigvals_(k) <= kRankTol * lmax) {
      if (c * c > kRankTol) return std::numeric_limits<double>::infinity();
    } else {
      out += c * c / eigvals_(k);
    }
  }
  return out;
}

AgentBound performance_metrics(const Mat2& efim_2x2) {
  AgentBound b;
  b.efim = 0.5 * (efim_2x2 + efim_2x2.transpose());
  Eigen::SelfAdjointEigenSolver<Mat2> es(b.efim);
  b.eigvals_ = es.eigenvalues().cwiseMax(0.0);
  b.eigvecs_ = es.eigenvectors();

  const double lmax = b.eigvals_.maxCoeff();
  const double lmin = b.eigvals_.minCoeff();
  if (lmax <= 0.0) {
    b.speb = std::numeric_limits<double>::infinity();
    b.ellipse_major = b.ellipse_minor = std::numeric_limits<double>::infinity();
    return b;
  }
  b.speb = (lmin > kRankTol * lmax) ? 1.0 / lmin + 1.0 / lmax
                                    : std::numeric_limits<double>::infinity();
  // eigenvalues ascend: col(0) pairs with the smallest one (major axis)
  b.ellipse_major = (lmin > kRankTol * lmax) ? 1.0 / std::sqrt(lmin)
                                             : std::numeric_limits<double>::infinity();
  b.ellipse_minor = 1.0 / std::sqrt(lmax);
  const Vec2 v = b.eigvecs_.col(0);
  b.ellipse_angle = std::atan2(v.y(), v.x());
  if (b.ellipse_angle < -M_PI / 2) b.ellipse_angle += M_PI;
  if (b.ellipse_angle >= M_PI / 2) b.ellipse_angle -= M_PI;
  return b;
}

}  // namespace netloc
