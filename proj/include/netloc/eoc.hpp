#pragma once

#include <optional>

#include "netloc/transition.hpp"

namespace netloc {

/// Decomposition of an agent's equivalent information into nominal
/// position information and the efficiency-of-cooperation discount:
///   EFIM_i = D_i (I + Delta_i)^{-1},  Delta_i = sum_{n>=1} [T^n]_{ii}.
/// The series runs over the agents-only operator; its sum coincides with
/// the exact value [J_e^{-1}]_{ii} D_i - I whenever the network EFIM is
/// invertible.
struct EocDecomposition {
  Mat2 npi = Mat2::Zero();          // D_i
  Mat2 delta = Mat2::Zero();        // series sum
  Mat2 eoc = Mat2::Identity();      // (I + Delta)^{-1}
  Mat2 hitting = Mat2::Zero();      // F_ii = I - EoC
  std::optional<Mat2> delta_exact;  // [J_e^{-1}]_{ii} D_i - I when supplied
  int truncation_n = 0;
  double truncation_residual = 0.0;
  bool converged = true;
};

/// Series evaluation of Delta_i with spectral-norm stopping rule.
/// `exact_agent_efim`, when given, provides the cross-validation value.
EocDecomposition eoc_decomposition(const TransitionOperator& agents_only, int agent,
                                   double tol = 1e-10, int max_n = 100000,
                                   const Mat2* exact_agent_efim = nullptr);

/// Convenience: builds the operator and the exact direct value.
EocDecomposition eoc_decomposition(const InformationGraph& g, int agent, double tol = 1e-10,
                                   int max_n = 100000);

}  // namespace netloc
