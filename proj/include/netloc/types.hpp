#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <stdexcept>
#include <string>

namespace netloc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

inline Vec2 unit_vec(double phi) { return {std::cos(phi), std::sin(phi)}; }

/// Outer projector u(phi) u(phi)^T onto the direction phi.
inline Mat2 dir_projector(double phi) {
  const Vec2 u = unit_vec(phi);
  return u * u.transpose();
}

inline Mat2 rotation(double theta) {
  Mat2 r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Square matrix addressed by 2x2 blocks. Thin wrapper over a dense
/// Eigen matrix; block (i,j) is rows 2i..2i+1, cols 2j..2j+1.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  explicit BlockMatrix(Eigen::Index n_blocks)
      : m_(MatrixXd::Zero(2 * n_blocks, 2 * n_blocks)) {}
  explicit BlockMatrix(MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0)
      throw std::invalid_argument("BlockMatrix: matrix must be square with even dimension");
  }

  Eigen::Index blocks() const { return m_.rows() / 2; }

  Eigen::Block<MatrixXd, 2, 2> operator()(Eigen::Index i, Eigen::Index j) {
    return m_.block<2, 2>(2 * i, 2 * j);
  }
  Eigen::Block<const MatrixXd, 2, 2> operator()(Eigen::Index i, Eigen::Index j) const {
    return m_.block<2, 2>(2 * i, 2 * j);
  }

  MatrixXd& matrix() { return m_; }
  const MatrixXd& matrix() const { return m_; }

  SpMat sparse(double prune_tol = 0.0) const {
    return SpMat(m_.sparseView(1.0, prune_tol));
  }

 private:
  MatrixXd m_;
};

struct SingularMatrixError : std::runtime_error {
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace netloc
