#include "netloc/potential.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace netloc {

namespace {

Mat2 sum_npi(std::span<const Mat2> npi) {
  Mat2 s = Mat2::Zero();
  for (const auto& d : npi) s += d;
  return s;
}

}  // namespace

PotentialKernel potential_kernel_finite(const TransitionOperator& aux) {
  if (aux.mode != TransitionMode::Auxiliary)
    throw std::invalid_argument("potential_kernel_finite: expected the auxiliary operator");
  if (aux.antennas == 1)
    throw SingularMatrixError(
        "potential_kernel_finite: range-only networks are unsupported "
        "(three-dimensional null space); use direct inversion");

  const int n = aux.dim();
  PotentialKernel k;
  k.n = n;
  k.npi = aux.npi;
  k.antennas = aux.antennas;

  // limit projector W with constant block columns S^{-1} D_b
  const Mat2 s_inv = sum_npi(aux.npi).inverse();
  MatrixXd sys = MatrixXd::Identity(2 * n, 2 * n) - aux.dense();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) sys.block<2, 2>(2 * a, 2 * b) += s_inv * aux.npi[b];

  Eigen::PartialPivLU<MatrixXd> lu(sys);
  const MatrixXd x = lu.solve(MatrixXd::Identity(2 * n, 2 * n));
  const double residual = (sys * x - MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff();
  if (!(residual < 1e-6))
    throw SingularMatrixError("potential_kernel_finite: fundamental system is singular");

  k.blocks.resize(2 * n, 2 * n);
  for (int a = 0; a < n; ++a) {
    const Mat2 xaa_dinv = x.block<2, 2>(2 * a, 2 * a) * aux.npi[a].inverse();
    for (int b = 0; b < n; ++b)
      k.blocks.block<2, 2>(2 * a, 2 * b) =
          b == a ? Mat2::Zero()  // telescoping is exact on the diagonal
                 : Mat2(xaa_dinv * aux.npi[b] - x.block<2, 2>(2 * a, 2 * b));
  }
  return k;
}

MatrixXd hitting_by_linear_solve(const TransitionOperator& op, std::span<const int> targets) {
  const int n = op.dim();
  std::vector<char> in_s(n, 0);
  for (int t : targets) in_s[t] = 1;
  std::vector<int> interior, slot(n, -1);
  for (int v = 0; v < n; ++v)
    if (!in_s[v]) {
      slot[v] = static_cast<int>(interior.size());
      interior.push_back(v);
    }
  const int m = static_cast<int>(interior.size());
  const int ns = static_cast<int>(targets.size());
  std::vector<int> tslot(n, -1);
  for (int t = 0; t < ns; ++t) tslot[targets[t]] = t;

  // (I - T_BB) X = T_BS over the interior B
  std::vector<Eigen::Triplet<double>> trip;
  MatrixXd rhs = MatrixXd::Zero(2 * m, 2 * ns);
  for (int v : interior) {
    const int r = slot[v];
    for (int a = 0; a < 2; ++a) trip.emplace_back(2 * r + a, 2 * r + a, 1.0);
    for (const auto& [j, blk] : op.rows[v]) {
      if (in_s[j]) {
        rhs.block<2, 2>(2 * r, 2 * tslot[j]) += blk;
      } else {
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            trip.emplace_back(2 * r + a, 2 * slot[j] + b, -blk(a, b));
      }
    }
  }
  MatrixXd x;
  if (m > 0) {
    SpMat sys(2 * m, 2 * m);
    sys.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu(sys);
    if (lu.info() != Eigen::Success)
      throw SingularMatrixError("hitting_by_linear_solve: interior system is singular");
    x = lu.solve(rhs);
  }

  MatrixXd out = MatrixXd::Zero(2 * n, 2 * ns);
  for (int v : interior) out.middleRows(2 * v, 2) = x.middleRows(2 * slot[v], 2);
  // one extra step for sources inside S: F(k, j) = T_kj + sum_B T_kB X
  for (int t : targets) {
    for (const auto& [j, blk] : op.rows[t]) {
      if (t == j) continue;  // self block of absorbing rows carries no step
      if (in_s[j])
        out.block<2, 2>(2 * t, 2 * tslot[j]) += blk;
      else
        out.middleRows(2 * t, 2) += blk * x.middleRows(2 * slot[j], 2);
    }
  }
  return out;
}

Mat2 HittingSet::self() const {
  const int s = source_slot();
  return block(s, s);
}

int HittingSet::source_slot() const {
  const auto it = std::find(targets.begin(), targets.end(), source);
  if (it == targets.end()) throw std::logic_error("HittingSet: source not in target set");
  return static_cast<int>(it - targets.begin());
}

MatrixXd hitting_from_restricted(const MatrixXd& p_restricted, std::span<const Mat2> npi,
                                 bool equal_npi) {
  const int ns = static_cast<int>(npi.size());
  if (p_restricted.rows() != 2 * ns || p_restricted.cols() != 2 * ns)
    throw std::invalid_argument("hitting_from_restricted: size mismatch");
  Eigen::PartialPivLU<MatrixXd> lu(p_restricted);
  const MatrixXd a = lu.solve(MatrixXd::Identity(2 * ns, 2 * ns));
  if (!((p_restricted * a - MatrixXd::Identity(2 * ns, 2 * ns)).cwiseAbs().maxCoeff() < 1e-6))
    throw SingularMatrixError("hitting_from_restricted: restricted kernel is singular");

  // row sums A Q and NPI-weighted column sums Q^T D A
  MatrixXd aq = MatrixXd::Zero(2 * ns, 2);
  MatrixXd qda = MatrixXd::Zero(2, 2 * ns);
  for (int r = 0; r < ns; ++r)
    for (int c = 0; c < ns; ++c) {
      const Mat2 blk = a.block<2, 2>(2 * r, 2 * c);
      aq.middleRows(2 * r, 2) += blk;
      qda.middleCols(2 * c, 2) += equal_npi ? blk : Mat2(npi[r] * blk);
    }
  Mat2 z = Mat2::Zero();
  for (int c = 0; c < ns; ++c) z += qda.block<2, 2>(0, 2 * c);

  return MatrixXd::Identity(2 * ns, 2 * ns) + a - aq * z.inverse() * qda;
}

HittingSet hitting_from_potential(const PotentialKernel& kernel, int source,
                                  std::span<const int> targets) {
  HittingSet h;
  h.source = source;
  h.targets.assign(targets.begin(), targets.end());
  std::sort(h.targets.begin(), h.targets.end());
  const int ns = static_cast<int>(h.targets.size());
  MatrixXd p(2 * ns, 2 * ns);
  std::vector<Mat2> d(ns);
  for (int r = 0; r < ns; ++r) {
    d[r] = kernel.npi[h.targets[r]];
    for (int c = 0; c < ns; ++c)
      p.block<2, 2>(2 * r, 2 * c) = kernel.block(h.targets[r], h.targets[c]);
  }
  h.blocks = hitting_from_restricted(p, d);
  return h;
}

Mat2 efim_via_routing(const HittingSet& hit, const Mat2& npi_source) {
  const int s = hit.source_slot();
  Mat2 sum = Mat2::Zero();
  for (std::size_t t = 0; t < hit.targets.size(); ++t)
    if (static_cast<int>(t) != s) sum += hit.block(s, static_cast<int>(t));
  return npi_source * sum;
}

// ---------------------------------------------------------------------------
// Selected-entry route: grounded sparse factorization plus a rank-4
// Woodbury correction. The fundamental matrix M = J~ + DQ S^{-1} Q^T D is
// dense through its rank-2 term, so we factorize the sparse grounded
// G = J~ + E_0 instead and correct. Diagonal blocks of G^{-1} come from
// forward-only triangular solves: [G^{-1}]_kk = ||L^{-1} P e_k||^2_{D^-1}.
// ---------------------------------------------------------------------------

struct PotentialRouteEvaluator::Impl {
  const InformationGraph* g = nullptr;
  int n = 0, nb = 0;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  // strict lower factor in CSC arrays
  std::vector<int> colptr, rowind;
  std::vector<double> lval;
  VectorXd dvec;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;

  MatrixXd y;        // G^{-1} V, V = [E_ground, D-weighted ones], 2n x 4
  Eigen::Matrix4d woodbury_k;
  MatrixXd anchor_cols;  // G^{-1} columns at anchors, 2n x 2nb
  MatrixXd p_anchor;     // anchor-anchor kernel block, 2nb x 2nb (not symmetric)
  Eigen::PartialPivLU<MatrixXd> p_anchor_lu;    // solves R x = b
  Eigen::PartialPivLU<MatrixXd> p_anchor_t_lu;  // solves R^T x = b

  // scratch for the forward solves
  mutable VectorXd w1, w2;
  mutable std::vector<char> nz1, nz2;
  mutable std::vector<int> touched1, touched2;

  void forward_solve(int k, VectorXd& w, std::vector<char>& nz, std::vector<int>& touched) const {
    w(k) = 1.0;
    nz[k] = 1;
    touched.push_back(k);
    const int dim = static_cast<int>(w.size());
    for (int j = k; j < dim; ++j) {
      if (!nz[j]) continue;
      const double xj = w(j);
      for (int t = colptr[j]; t < colptr[j + 1]; ++t) {
        const int r = rowind[t];
        if (!nz[r]) {
          nz[r] = 1;
          w(r) = 0.0;
          touched.push_back(r);
        }
        w(r) -= lval[t] * xj;
      }
    }
  }

  Mat2 ginv_diag_block(int node) const {
    const int k1 = perm.indices()(2 * node), k2 = perm.indices()(2 * node + 1);
    forward_solve(k1, w1, nz1, touched1);
    forward_solve(k2, w2, nz2, touched2);
    Mat2 blk = Mat2::Zero();
    for (int t : touched1) blk(0, 0) += w1(t) * w1(t) / dvec(t);
    for (int t : touched2) blk(1, 1) += w2(t) * w2(t) / dvec(t);
    for (int t : touched1)
      if (nz2[t]) blk(0, 1) += w1(t) * w2(t) / dvec(t);
    blk(1, 0) = blk(0, 1);
    for (int t : touched1) {
      nz1[t] = 0;
      w1(t) = 0.0;
    }
    for (int t : touched2) {
      nz2[t] = 0;
      w2(t) = 0.0;
    }
    touched1.clear();
    touched2.clear();
    return blk;
  }

  Mat2 minv(int a, const Mat2& ginv_ab, int b) const {
    return ginv_ab - y.middleRows(2 * a, 2) * woodbury_k * y.middleRows(2 * b, 2).transpose();
  }
  Mat2 minv_anchor(int a, int k) const {  // [M^{-1}]_{a, anchor k}
    return minv(a, anchor_cols.block<2, 2>(2 * a, 2 * k), g->n_agents + k);
  }

  // F blocks for S = {agent} u anchors via the partitioned kernel inverse
  MatrixXd hitting_row(int agent) const {
    const Mat2 mii = minv(agent, ginv_diag_block(agent), agent);
    const int s = nb + 1;
    MatrixXd p_row(2, 2 * nb), p_col(2 * nb, 2);
    for (int k = 0; k < nb; ++k) {
      const int v = g->n_agents + k;
      const Mat2 miv = minv_anchor(agent, k);
      p_row.block<2, 2>(0, 2 * k) = (mii - miv) * g->npi[v];
      const Mat2 mvv = minv_anchor(v, k);
      p_col.block<2, 2>(2 * k, 0) = (mvv - miv.transpose()) * g->npi[agent];
    }
    // P_S^{-1} via the Schur complement of the (vanishing) agent block
    const MatrixXd rinv_c = p_anchor_lu.solve(p_col);                            // R^{-1} c
    const MatrixXd r_rinv = p_anchor_t_lu.solve(p_row.transpose()).transpose();  // r R^{-1}
    const Mat2 schur = -p_row * rinv_c;
    const Mat2 schur_inv = schur.inverse();

    MatrixXd a(2 * s, 2 * s);
    a.block<2, 2>(0, 0) = schur_inv;
    a.block(0, 2, 2, 2 * nb) = -schur_inv * r_rinv;
    a.block(2, 0, 2 * nb, 2) = -rinv_c * schur_inv;
    a.block(2, 2, 2 * nb, 2 * nb) =
        p_anchor_lu.solve(MatrixXd::Identity(2 * nb, 2 * nb)) + rinv_c * schur_inv * r_rinv;

    MatrixXd aq = MatrixXd::Zero(2 * s, 2);
    MatrixXd qda = MatrixXd::Zero(2, 2 * s);
    for (int r = 0; r < s; ++r) {
      const Mat2 dr = r == 0 ? g->npi[agent] : g->npi[g->n_agents + r - 1];
      for (int c = 0; c < s; ++c) {
        const Mat2 blk = a.block<2, 2>(2 * r, 2 * c);
        aq.middleRows(2 * r, 2) += blk;
        qda.middleCols(2 * c, 2) += dr * blk;
      }
    }
    Mat2 z = Mat2::Zero();
    for (int c = 0; c < s; ++c) z += qda.block<2, 2>(0, 2 * c);

    MatrixXd f0(2, 2 * s);
    const Mat2 lead = aq.topRows<2>() * z.inverse();
    for (int c = 0; c < s; ++c) {
      Mat2 blk = a.block<2, 2>(0, 2 * c) - lead * qda.block<2, 2>(0, 2 * c);
      if (c == 0) blk += Mat2::Identity();
      f0.block<2, 2>(0, 2 * c) = blk;
    }
    return f0;
  }
};

PotentialRouteEvaluator::PotentialRouteEvaluator(const InformationGraph& g) : impl_(new Impl) {
  if (g.antennas == 1)
    throw SingularMatrixError("PotentialRouteEvaluator: range-only networks unsupported");
  if (g.n_anchors == 0)
    throw SingularMatrixError("PotentialRouteEvaluator: no anchors");
  auto& im = *impl_;
  im.g = &g;
  im.n = g.n_nodes();
  im.nb = g.n_anchors;

  SpMat grounded = assemble_efim_sparse(g, EfimMode::Auxiliary);
  // ground node 0 to make the matrix definite
  SpMat e0(2 * im.n, 2 * im.n);
  e0.insert(0, 0) = 1.0;
  e0.insert(1, 1) = 1.0;
  grounded += e0;
  im.ldlt.compute(grounded);
  if (im.ldlt.info() != Eigen::Success)
    throw SingularMatrixError("PotentialRouteEvaluator: grounded factorization failed");

  // materialize the strict lower factor once
  const SpMat lfac = im.ldlt.matrixL();
  im.colptr.assign(2 * im.n + 1, 0);
  for (int j = 0; j < 2 * im.n; ++j) {
    for (SpMat::InnerIterator it(lfac, j); it; ++it)
      if (it.row() > j) {
        im.rowind.push_back(static_cast<int>(it.row()));
        im.lval.push_back(it.value());
      }
    im.colptr[j + 1] = static_cast<int>(im.rowind.size());
  }
  im.dvec = im.ldlt.vectorD();
  im.perm = im.ldlt.permutationP();
  im.w1 = VectorXd::Zero(2 * im.n);
  im.w2 = VectorXd::Zero(2 * im.n);
  im.nz1.assign(2 * im.n, 0);
  im.nz2.assign(2 * im.n, 0);

  // Woodbury data: M = G + V C V^T with V = [E_0 | D-stacked], C = diag(-I, S^{-1})
  MatrixXd v = MatrixXd::Zero(2 * im.n, 4);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0;
  for (int a = 0; a < im.n; ++a) v.block<2, 2>(2 * a, 2) = g.npi[a];
  im.y = im.ldlt.solve(v);
  const Mat2 s2 = sum_npi(g.npi);
  Eigen::Matrix4d cinv = Eigen::Matrix4d::Zero();
  cinv.block<2, 2>(0, 0) = -Mat2::Identity();
  cinv.block<2, 2>(2, 2) = s2;
  im.woodbury_k = (cinv + v.transpose() * im.y).inverse();

  MatrixXd rhs = MatrixXd::Zero(2 * im.n, 2 * im.nb);
  for (int k = 0; k < im.nb; ++k) {
    rhs(2 * (g.n_agents + k), 2 * k) = 1.0;
    rhs(2 * (g.n_agents + k) + 1, 2 * k + 1) = 1.0;
  }
  im.anchor_cols = im.ldlt.solve(rhs);

  im.p_anchor.resize(2 * im.nb, 2 * im.nb);
  for (int a = 0; a < im.nb; ++a) {
    const Mat2 maa = im.minv_anchor(g.n_agents + a, a);
    for (int b = 0; b < im.nb; ++b) {
      const Mat2 mab = im.minv_anchor(g.n_agents + a, b);
      im.p_anchor.block<2, 2>(2 * a, 2 * b) = (maa - mab) * g.npi[g.n_agents + b];
    }
  }
  if (im.nb > 1) {
    im.p_anchor_lu.compute(im.p_anchor);
    im.p_anchor_t_lu.compute(im.p_anchor.transpose());
  }
}

PotentialRouteEvaluator::~PotentialRouteEvaluator() = default;
PotentialRouteEvaluator::PotentialRouteEvaluator(PotentialRouteEvaluator&&) noexcept = default;

MatrixXd PotentialRouteEvaluator::hitting_row(int agent) const {
  auto& im = *impl_;
  if (agent < 0 || agent >= im.g->n_agents)
    throw std::invalid_argument("hitting_row: agent out of range");
  if (im.nb == 1) {
    // single anchor: P_S is off-diagonal only, invert directly
    const int v = im.g->n_agents;
    const Mat2 mii = im.minv(agent, im.ginv_diag_block(agent), agent);
    const Mat2 miv = im.minv_anchor(agent, 0);
    const Mat2 mvv = im.minv_anchor(v, 0);
    MatrixXd p(4, 4);
    p.setZero();
    p.block<2, 2>(0, 2) = (mii - miv) * im.g->npi[v];
    p.block<2, 2>(2, 0) = (mvv - miv.transpose()) * im.g->npi[agent];
    const Mat2 d2[2] = {im.g->npi[agent], im.g->npi[v]};
    const MatrixXd f = hitting_from_restricted(p, std::span<const Mat2>(d2, 2));
    return f.topRows<2>();
  }
  return im.hitting_row(agent);
}

Mat2 PotentialRouteEvaluator::hitting_self(int agent) const {
  return hitting_row(agent).block<2, 2>(0, 0);
}

Mat2 PotentialRouteEvaluator::efim_routing(int agent) const {
  const MatrixXd row = hitting_row(agent);
  Mat2 sum = Mat2::Zero();
  for (int k = 1; k <= impl_->nb; ++k) sum += row.block<2, 2>(0, 2 * k);
  return impl_->g->npi[agent] * sum;
}

double PotentialRouteEvaluator::objective() const {
  double obj = 0.0;
  for (int i = 0; i < impl_->g->n_agents; ++i) {
    const Mat2 efim = impl_->g->npi[i] * (Mat2::Identity() - hitting_self(i));
    obj += efim.inverse().trace();
  }
  return obj;
}

double naive_network_objective(std::span<const NetworkTopology> samples,
                               const RadioParams& radio) {
  if (samples.empty()) throw std::invalid_argument("naive_network_objective: no samples");
  double acc = 0.0;
  for (const auto& topo : samples) {
    const InformationGraph g = build_information_graph(topo, radio);
    const MatrixXd j = assemble_efim(g, EfimMode::Original).matrix();
    const MatrixXd inv = j.partialPivLu().solve(MatrixXd::Identity(j.rows(), j.cols()));
    acc += inv.trace();
  }
  return acc / static_cast<double>(samples.size());
}

double fast_network_objective(std::span<const NetworkTopology> samples,
                              const RadioParams& radio) {
  if (samples.empty()) throw std::invalid_argument("fast_network_objective: no samples");
  double acc = 0.0;
  for (const auto& topo : samples) {
    if (!topo.connected)
      throw std::invalid_argument("fast_network_objective: sample is not connected");
    const InformationGraph g = build_information_graph(topo, radio);
    acc += PotentialRouteEvaluator(g).objective();
  }
  return acc / static_cast<double>(samples.size());
}

}  // namespace netloc
