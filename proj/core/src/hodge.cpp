#include "hodgekit/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

#include "hodgekit/errors.hpp"

namespace hodgekit {

namespace {

void check_degree(const HodgeSystem& s, int p) {
  if (p < 0 || p > s.dimension())
    throw Error(ErrorCode::degree, "degree " + std::to_string(p) + " outside 0.." +
                                       std::to_string(s.dimension()));
}

void check_owned(const HodgeSystem& s, const Cochain& x) {
  check_degree(s, x.degree());
  if (x.complex_id() != s.complex().id() ||
      x.size() != static_cast<Eigen::Index>(s.complex().count(x.degree())))
    throw Error(ErrorCode::shape, "cochain does not belong to the system's complex");
}

double m_norm(const MetricStructure& m, int p, const Eigen::VectorXd& x) {
  if (x.size() == 0) return 0.0;
  return std::sqrt(std::max(x.dot(m.mass(p) * x), 0.0));
}

Cochain empty_cochain(int degree, const std::string& id) {
  return Cochain(degree, Eigen::VectorXd(), id);
}

}  // namespace

std::shared_ptr<const HodgeSystem> HodgeSystem::build(MetricPtr metric, HodgeOptions options) {
  if (!(options.rank_cutoff > 0.0) || !(options.solver_tolerance > 0.0) ||
      !(options.exactness_tolerance > 0.0))
    throw Error(ErrorCode::parameter, "tolerances must be positive");
  auto result = std::shared_ptr<HodgeSystem>(new HodgeSystem());
  HodgeSystem& s = *result;
  s.metric_ = std::move(metric);
  s.options_ = options;
  const int n = s.metric_->dimension();
  const auto betti = s.metric_->complex().betti_numbers();

  for (int p = 0; p <= n; ++p) s.laplacians_.emplace_back(s.metric_, p);
  s.harmonic_.resize(n + 1);
  s.diagnostics_.resize(n + 1);
  s.green_solvers_.resize(n + 1);

  for (int p = 0; p <= n; ++p) {
    const Laplacian& lap = s.laplacians_[p];
    HarmonicDiagnostics& diag = s.diagnostics_[p];
    diag.betti = betti[p];
    const auto size = static_cast<int>(s.metric_->complex().count(p));
    const int want = std::min(betti[p] + 3, size);
    const SpectrumEstimate spec =
        lowest_eigenpairs(lap, want, betti[p], options.seed + static_cast<std::uint64_t>(p));
    diag.lambda_max = spec.lambda_max;
    diag.cutoff = options.rank_cutoff * spec.lambda_max;
    diag.lowest = spec.values;
    diag.dense = spec.dense;
    diag.iterations = spec.iterations;

    std::vector<Eigen::Index> null_columns;
    for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
      const double lambda = spec.values[i];
      if (lambda > 0.1 * diag.cutoff && lambda < 10.0 * diag.cutoff) {
        std::ostringstream os;
        os << "rank ambiguity in degree " << p << ": eigenvalue " << lambda
           << " lies within a factor 10 of the cutoff " << diag.cutoff
           << "; choose a finer rank cutoff";
        throw Error(ErrorCode::numerical, os.str());
      }
      if (lambda < diag.cutoff) null_columns.push_back(i);
    }
    diag.numerical_nullity = static_cast<int>(null_columns.size());
    if (diag.numerical_nullity != betti[p]) {
      std::ostringstream os;
      os << "harmonic space of degree " << p << " has numerical dimension "
         << diag.numerical_nullity << " but the Betti number is " << betti[p];
      throw Error(ErrorCode::numerical, os.str());
    }
    Eigen::MatrixXd h(size, diag.numerical_nullity);
    for (std::size_t k = 0; k < null_columns.size(); ++k)
      h.col(static_cast<Eigen::Index>(k)) = spec.vectors.col(null_columns[k]);
    s.harmonic_[p] = std::move(h);

    const Eigen::MatrixXd constraint = s.metric_->mass(p) * s.harmonic_[p];
    s.green_solvers_[p] = std::make_shared<const MixedLaplacianSolver>(
        lap, 0.0, constraint, options.solver_tolerance);
  }
  return result;
}

const Eigen::MatrixXd& HodgeSystem::harmonic_matrix(int p) const {
  check_degree(*this, p);
  return harmonic_[p];
}

const HarmonicDiagnostics& HodgeSystem::diagnostics(int p) const {
  check_degree(*this, p);
  return diagnostics_[p];
}

const Laplacian& HodgeSystem::laplacian(int p) const {
  check_degree(*this, p);
  return laplacians_[p];
}

Eigen::VectorXd HodgeSystem::project_harmonic(int p, const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd& h = harmonic_matrix(p);
  if (h.cols() == 0) return Eigen::VectorXd::Zero(x.size());
  return h * (h.transpose() * (metric_->mass(p) * x));
}

MixedLaplacianSolver::Solution HodgeSystem::solve_green(int p, const Eigen::VectorXd& f) const {
  check_degree(*this, p);
  const Eigen::VectorXd projected = f - project_harmonic(p, f);
  return green_solvers_[p]->solve(projected);
}

HodgePtr build_hodge_system(MetricPtr metric, HodgeOptions options) {
  return HodgeSystem::build(std::move(metric), options);
}

std::vector<Cochain> harmonic_basis(const HodgeSystem& system, int p) {
  const Eigen::MatrixXd& h = system.harmonic_matrix(p);
  std::vector<Cochain> out;
  out.reserve(static_cast<std::size_t>(h.cols()));
  for (Eigen::Index k = 0; k < h.cols(); ++k)
    out.emplace_back(p, h.col(k), system.complex().id());
  return out;
}

Cochain green(const HodgeSystem& system, const Cochain& omega) {
  check_owned(system, omega);
  auto sol = system.solve_green(omega.degree(), omega.values());
  return Cochain(omega.degree(), std::move(sol.u), omega.complex_id());
}

Decomposition decompose(const HodgeSystem& system, const Cochain& omega) {
  check_owned(system, omega);
  const MetricStructure& m = system.metric();
  const int p = omega.degree();
  const int n = system.dimension();
  const std::string& id = omega.complex_id();

  const auto sol = system.solve_green(p, omega.values());
  Decomposition out;
  out.solver_residual = sol.relative_residual;
  out.harmonic = Cochain(p, system.project_harmonic(p, omega.values()), id);
  if (p > 0) {
    out.alpha = Cochain(p - 1, sol.sigma, id);
    out.exact = Cochain(p, m.d(p - 1) * sol.sigma, id);
  } else {
    out.alpha = empty_cochain(-1, id);
    out.exact = cochain_zero(system.complex(), p);
  }
  if (p < n) {
    Eigen::VectorXd beta = m.d(p) * sol.u;
    out.coexact = Cochain(p, apply_delta(m, p + 1, beta), id);
    out.beta = Cochain(p + 1, std::move(beta), id);
  } else {
    out.beta = empty_cochain(n + 1, id);
    out.coexact = cochain_zero(system.complex(), p);
  }

  const double norm = m_norm(m, p, omega.values());
  const Eigen::VectorXd rest =
      omega.values() - out.exact.values() - out.coexact.values() - out.harmonic.values();
  out.residual = norm > 0.0 ? m_norm(m, p, rest) / norm : m_norm(m, p, rest);
  const double scale = norm > 0.0 ? norm * norm : 1.0;
  const SparseMatrix& mass = m.mass(p);
  const double eh = std::abs(out.exact.values().dot(mass * out.harmonic.values()));
  const double ec = std::abs(out.exact.values().dot(mass * out.coexact.values()));
  const double ch = std::abs(out.coexact.values().dot(mass * out.harmonic.values()));
  out.orthogonality = std::max({eh, ec, ch}) / scale;
  return out;
}

ExactnessReport is_exact(const HodgeSystem& system, const Cochain& omega, double tol) {
  check_owned(system, omega);
  const MetricStructure& m = system.metric();
  const int p = omega.degree();
  ExactnessReport r;
  r.tolerance = tol;
  const double norm = m_norm(m, p, omega.values());
  if (norm == 0.0) {
    r.exact = true;
    return r;
  }
  if (p < system.dimension())
    r.closedness_residual = m_norm(m, p + 1, m.d(p) * omega.values()) / norm;
  r.harmonic_residual = m_norm(m, p, system.project_harmonic(p, omega.values())) / norm;
  r.exact = r.closedness_residual <= tol && r.harmonic_residual <= tol;
  return r;
}

Cochain primitive(const HodgeSystem& system, const Cochain& omega) {
  check_owned(system, omega);
  const int p = omega.degree();
  if (p < 1) throw Error(ErrorCode::degree, "primitive needs a cochain of degree >= 1");
  const ExactnessReport ex = is_exact(system, omega, system.options().exactness_tolerance);
  if (!ex.exact) {
    std::ostringstream os;
    os << "cochain is not exact:";
    if (ex.closedness_residual > ex.tolerance)
      os << " closedness test failed (||d omega||/||omega|| = " << ex.closedness_residual << ")";
    if (ex.harmonic_residual > ex.tolerance)
      os << " harmonic test failed (||P_H omega||/||omega|| = " << ex.harmonic_residual << ")";
    os << "; tolerance " << ex.tolerance;
    throw Error(ErrorCode::not_exact, os.str());
  }
  auto sol = system.solve_green(p, omega.values());
  return Cochain(p - 1, std::move(sol.sigma), omega.complex_id());
}

Cochain project_kernel_d(const HodgeSystem& system, const Cochain& x) {
  check_owned(system, x);
  const MetricStructure& m = system.metric();
  const int p = x.degree();
  Eigen::VectorXd out = system.project_harmonic(p, x.values());
  if (p > 0) {
    // Exact part: d f with f minimizing ||d f - x||_M (normal equations, CG
    // on the consistent semidefinite system).
    const SparseMatrix& d = m.d(p - 1);
    const SparseMatrix normal = d.transpose() * m.mass(p) * d;
    const Eigen::VectorXd rhs = d.transpose() * (m.mass(p) * x.values());
    // Stop at the rounding level of the data, not of rhs: for nearly coexact x
    // the rhs is pure noise with components along ker d, and chasing it makes
    // CG drift without bound.
    const SparseMatrix abs_d = d.cwiseAbs();
    const SparseMatrix abs_m = m.mass(p).cwiseAbs();
    const double noise =
        1e-13 * (abs_d.transpose() * (abs_m * x.values().cwiseAbs())).norm();
    const double rhs_norm = rhs.norm();
    if (rhs_norm > noise) {
      Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg(normal);
      cg.setTolerance(std::max(noise / rhs_norm, 1e-15));
      cg.setMaxIterations(10 * static_cast<Eigen::Index>(normal.rows()) + 100);
      const Eigen::VectorXd f = cg.solve(rhs);
      out += d * f;
    }
  }
  return Cochain(p, std::move(out), x.complex_id());
}

}  // namespace hodgekit
