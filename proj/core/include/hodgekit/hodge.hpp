#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "hodgekit/complex.hpp"
#include "hodgekit/metric.hpp"
#include "hodgekit/spectrum.hpp"

namespace hodgekit {

struct HodgeOptions {
  /// Eigenvalues below rank_cutoff * lambda_max count as harmonic.
  double rank_cutoff = 1e-9;
  /// Relative residual target of the mixed solves.
  double solver_tolerance = 1e-12;
  /// Default tolerance of is_exact / primitive.
  double exactness_tolerance = 1e-8;
  std::uint64_t seed = 0x686f646765ull;
};

/// What the harmonic-space computation saw for one degree.
struct HarmonicDiagnostics {
  int betti = 0;            // exact, from integer ranks
  int numerical_nullity = 0;
  double lambda_max = 0.0;
  double cutoff = 0.0;
  Eigen::VectorXd lowest;   // lowest computed eigenvalues (Ritz values)
  bool dense = false;
  int iterations = 0;
};

/// Harmonic bases and factored Green solvers for every degree of a complex.
///
/// Immutable after build; all query operations are const and may be called
/// concurrently.
class HodgeSystem {
 public:
  /// Error(numerical) when an eigenvalue falls within a factor 10 of the rank
  /// cutoff or the numerical nullity disagrees with the Betti number.
  static std::shared_ptr<const HodgeSystem> build(MetricPtr metric, HodgeOptions options = {});

  const MetricStructure& metric() const noexcept { return *metric_; }
  const MetricPtr& metric_ptr() const noexcept { return metric_; }
  const SimplicialComplex& complex() const noexcept { return metric_->complex(); }
  int dimension() const noexcept { return metric_->dimension(); }
  const HodgeOptions& options() const noexcept { return options_; }

  /// N_p x b_p matrix of M-orthonormal harmonic cochains.
  const Eigen::MatrixXd& harmonic_matrix(int p) const;
  const HarmonicDiagnostics& diagnostics(int p) const;
  const Laplacian& laplacian(int p) const;

  /// M-orthogonal projection onto the harmonic space.
  Eigen::VectorXd project_harmonic(int p, const Eigen::VectorXd& x) const;

  /// Solves Delta u = f - P_H f with u orthogonal to H; also returns delta u.
  MixedLaplacianSolver::Solution solve_green(int p, const Eigen::VectorXd& f) const;

 private:
  HodgeSystem() = default;

  MetricPtr metric_;
  HodgeOptions options_;
  std::vector<Eigen::MatrixXd> harmonic_;
  std::vector<HarmonicDiagnostics> diagnostics_;
  std::vector<Laplacian> laplacians_;
  std::vector<std::shared_ptr<const MixedLaplacianSolver>> green_solvers_;
};

using HodgePtr = std::shared_ptr<const HodgeSystem>;

HodgePtr build_hodge_system(MetricPtr metric, HodgeOptions options = {});

/// M-orthonormal basis of the harmonic p-cochains; its size equals b_p.
std::vector<Cochain> harmonic_basis(const HodgeSystem& system, int p);

/// Green operator, extended by zero on harmonic cochains.
Cochain green(const HodgeSystem& system, const Cochain& omega);

struct Decomposition {
  Cochain exact;      // d alpha
  Cochain coexact;    // delta beta
  Cochain harmonic;   // P_H omega
  Cochain alpha;      // delta G omega, degree p-1 (empty for p = 0)
  Cochain beta;       // d G omega, degree p+1 (empty for p = n)
  double residual = 0.0;              // ||omega - sum of parts|| / ||omega||
  double orthogonality = 0.0;         // max |<a, b>| / ||omega||^2 over part pairs
  double solver_residual = 0.0;       // relative residual of the mixed solve
};

Decomposition decompose(const HodgeSystem& system, const Cochain& omega);

struct ExactnessReport {
  bool exact = false;
  double closedness_residual = 0.0;  // ||d omega|| / ||omega||
  double harmonic_residual = 0.0;    // ||P_H omega|| / ||omega||
  double tolerance = 0.0;
};

/// Closed with no harmonic component. The zero cochain is exact.
ExactnessReport is_exact(const HodgeSystem& system, const Cochain& omega, double tol);

/// d^{-1} omega = delta G omega, the unique coexact primitive. Error(not_exact)
/// when omega fails is_exact at the system's exactness tolerance, and
/// Error(degree) for p = 0.
Cochain primitive(const HodgeSystem& system, const Cochain& omega);

/// M-orthogonal projection onto ker d_p = im d_{p-1} + H^p. The exact part is
/// a least-squares fit through the normal equations of d_{p-1}, independent of
/// the Green solver.
Cochain project_kernel_d(const HodgeSystem& system, const Cochain& x);

}  // namespace hodgekit
