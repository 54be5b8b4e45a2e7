#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "hodgekit/complex.hpp"

namespace hodgekit {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class MetricScheme { whitney, lumped };

std::string_view to_string(MetricScheme scheme) noexcept;
/// "whitney" or "lumped"; Error(parameter) otherwise.
MetricScheme parse_scheme(std::string_view name);

/// Per-degree L2 inner products on cochains.
///
/// The Whitney scheme assembles Galerkin mass matrices of Whitney forms; the
/// lumped scheme uses diagonal circumcentric Hodge stars and therefore needs
/// a well-centered mesh. Each mass matrix is factored once at build time.
class MetricStructure {
 public:
  /// Error(geometry) on degenerate simplices, Error(scheme) if the lumped
  /// scheme meets a simplex whose circumcenter is not interior.
  static std::shared_ptr<const MetricStructure> build(ComplexPtr complex, MetricScheme scheme);

  const SimplicialComplex& complex() const noexcept { return *complex_; }
  const ComplexPtr& complex_ptr() const noexcept { return complex_; }
  int dimension() const noexcept { return complex_->dimension(); }
  MetricScheme scheme() const noexcept { return scheme_; }

  const SparseMatrix& mass(int p) const;
  /// M_p^{-1} rhs through the cached Cholesky factor.
  Eigen::VectorXd solve_mass(int p, const Eigen::VectorXd& rhs) const;
  /// Diagonal Hodge star of degree p; only for the lumped scheme.
  Eigen::VectorXd diagonal_star(int p) const;

  /// p-volumes of all p-simplices (1 for vertices).
  const Eigen::VectorXd& volumes(int p) const;

  /// Integer coboundary as a double-valued sparse matrix, d_p for 0 <= p < n.
  const SparseMatrix& d(int p) const;

 private:
  MetricStructure() = default;

  ComplexPtr complex_;
  MetricScheme scheme_ = MetricScheme::whitney;
  std::vector<SparseMatrix> mass_;
  std::vector<std::shared_ptr<Eigen::SimplicialLLT<SparseMatrix>>> factor_;
  std::vector<Eigen::VectorXd> volumes_;
  std::vector<SparseMatrix> d_;
};

using MetricPtr = std::shared_ptr<const MetricStructure>;

MetricPtr build_metric(ComplexPtr complex, MetricScheme scheme);

/// Circumcentric dual cell lengths of vertices in a 1-dimensional mesh: each
/// edge gives half its length to both endpoints. Open chains are allowed, so
/// this is also the diagonal of the lumped M_0 of any segment mesh.
Eigen::VectorXd dual_vertex_lengths(Eigen::Index vertex_count, const std::vector<Simplex>& edges,
                                    const std::vector<double>& lengths);

/// x^T M_p y. Error(shape) on degree or complex mismatch.
double inner(const MetricStructure& metric, const Cochain& x, const Cochain& y);
double l2_norm(const MetricStructure& metric, const Cochain& x);

/// delta_p = M_{p-1}^{-1} d_{p-1}^T M_p, the M-adjoint of d.
class Codifferential {
 public:
  /// Error(degree) unless 0 <= p <= n. For p = 0 the operator maps onto the
  /// empty degree -1 and is identically zero.
  Codifferential(MetricPtr metric, int p);

  int source_degree() const noexcept { return p_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Cochain operator()(const Cochain& x) const;
  /// Column-by-column materialization; intended for small meshes and tests.
  Eigen::MatrixXd dense() const;

 private:
  MetricPtr metric_;
  int p_;
};

Codifferential codifferential(MetricPtr metric, int p);

/// Hodge Laplacian Delta_p = delta_{p+1} d_p + d_{p-1} delta_p.
///
/// Besides application, the operator keeps the pieces of the weak form
/// M_p Delta_p = K_p + B_p M_{p-1}^{-1} B_p^T with K_p = d_p^T M_{p+1} d_p and
/// B_p = M_p d_{p-1}, which the mixed solvers factor.
class Laplacian {
 public:
  Laplacian(MetricPtr metric, int p);

  int degree() const noexcept { return p_; }
  const MetricStructure& metric() const noexcept { return *metric_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Cochain operator()(const Cochain& x) const;
  Eigen::MatrixXd dense() const;

  /// d_p^T M_{p+1} d_p (empty-sized zero for p = n).
  const SparseMatrix& curl_stiffness() const noexcept { return curl_; }
  /// M_p d_{p-1} (zero columns for p = 0).
  const SparseMatrix& coupling() const noexcept { return coupling_; }

 private:
  MetricPtr metric_;
  int p_;
  SparseMatrix curl_;
  SparseMatrix coupling_;
};

Laplacian laplacian(MetricPtr metric, int p);

/// d applied with the metric's cached double-valued coboundary. p = n gives an
/// empty cochain of degree n + 1.
Eigen::VectorXd apply_d(const MetricStructure& metric, int p, const Eigen::VectorXd& x);
/// delta_p applied to raw values; p = 0 gives an empty vector.
Eigen::VectorXd apply_delta(const MetricStructure& metric, int p, const Eigen::VectorXd& x);

}  // namespace hodgekit
