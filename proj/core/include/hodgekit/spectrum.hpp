#pragma once

#include <cstdint>
#include <memory>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "hodgekit/metric.hpp"

namespace hodgekit {

/// Direct solver for the mixed form of (Delta_p + shift) u = f.
///
/// Unknowns are sigma = delta_p u in degree p-1, u in degree p and, when
/// constraint columns C are supplied, Lagrange multipliers enforcing C^T u = 0:
///
///   [ -M_{p-1}   B^T              0 ] [sigma]   [  0  ]
///   [  B         K + shift*M_p    C ] [  u  ] = [M_p f]
///   [  0         C^T              0 ] [ mu  ]   [  0  ]
///
/// with B = M_p d_{p-1} and K = d_p^T M_{p+1} d_p. The block matrix stays
/// sparse for Whitney mass matrices, whose inverses are dense. Solves are
/// followed by iterative refinement against the assembled matrix.
class MixedLaplacianSolver {
 public:
  struct Solution {
    Eigen::VectorXd u;
    Eigen::VectorXd sigma;  // delta_p u; empty for p = 0
    double relative_residual = 0.0;
    int refinement_steps = 0;
  };

  MixedLaplacianSolver(const Laplacian& laplacian, double shift,
                       const Eigen::MatrixXd& constraint = {}, double tolerance = 1e-12);

  /// Error(numerical) if refinement cannot bring the relative residual of the
  /// block system below 1e3 * tolerance.
  Solution solve(const Eigen::VectorXd& f) const;

  int degree() const noexcept { return p_; }

 private:
  const MetricStructure* metric_;
  int p_;
  Eigen::Index n_sigma_ = 0, n_u_ = 0, n_mu_ = 0;
  double tolerance_;
  SparseMatrix system_;
  std::shared_ptr<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu_;
};

/// Lowest eigenpairs of the M-self-adjoint Laplacian.
struct SpectrumEstimate {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  double lambda_max = 0.0;  // exact (dense path) or power-iteration estimate
  int iterations = 0;       // subspace iterations; 0 for the dense path
  bool dense = false;
};

/// Small problems (<= dense_limit unknowns) use a dense generalized
/// eigensolve of (M Delta, M); larger ones use shift-inverted subspace
/// iteration with Rayleigh-Ritz, started from seeded random vectors. Only the
/// lowest `converge_count` Ritz values are required to settle; the rest are
/// upper bounds for the corresponding eigenvalues.
SpectrumEstimate lowest_eigenpairs(const Laplacian& laplacian, int count, int converge_count,
                                   std::uint64_t seed, Eigen::Index dense_limit = 400);

}  // namespace hodgekit
