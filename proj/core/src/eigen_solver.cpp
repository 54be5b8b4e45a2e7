#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "hodgekit/errors.hpp"
#include "hodgekit/spectrum.hpp"

namespace hodgekit {

MixedLaplacianSolver::MixedLaplacianSolver(const Laplacian& laplacian, double shift,
                                           const Eigen::MatrixXd& constraint, double tolerance)
    : metric_(&laplacian.metric()), p_(laplacian.degree()), tolerance_(tolerance) {
  const MetricStructure& m = *metric_;
  n_u_ = static_cast<Eigen::Index>(m.complex().count(p_));
  n_sigma_ = p_ > 0 ? static_cast<Eigen::Index>(m.complex().count(p_ - 1)) : 0;
  n_mu_ = constraint.cols();
  if (n_mu_ > 0 && constraint.rows() != n_u_)
    throw Error(ErrorCode::shape, "constraint columns do not match the degree-" +
                                      std::to_string(p_) + " cochain space");
  const Eigen::Index size = n_sigma_ + n_u_ + n_mu_;

  std::vector<Eigen::Triplet<double>> t;
  auto add = [&](const SparseMatrix& a, Eigen::Index r0, Eigen::Index c0, double scale) {
    for (Eigen::Index j = 0; j < a.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(a, j); it; ++it)
        t.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
  };
  if (p_ > 0) {
    add(m.mass(p_ - 1), 0, 0, -1.0);
    const SparseMatrix bt = laplacian.coupling().transpose();
    add(bt, 0, n_sigma_, 1.0);
    add(laplacian.coupling(), n_sigma_, 0, 1.0);
  }
  add(laplacian.curl_stiffness(), n_sigma_, n_sigma_, 1.0);
  if (shift != 0.0) add(m.mass(p_), n_sigma_, n_sigma_, shift);
  for (Eigen::Index k = 0; k < n_mu_; ++k)
    for (Eigen::Index i = 0; i < n_u_; ++i) {
      const double c = constraint(i, k);
      if (c == 0.0) continue;
      t.emplace_back(n_sigma_ + i, n_sigma_ + n_u_ + k, c);
      t.emplace_back(n_sigma_ + n_u_ + k, n_sigma_ + i, c);
    }
  system_.resize(size, size);
  system_.setFromTriplets(t.begin(), t.end());
  system_.makeCompressed();

  lu_ = std::make_shared<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>>();
  lu_->analyzePattern(system_);
  lu_->factorize(system_);
  if (lu_->info() != Eigen::Success)
    throw Error(ErrorCode::numerical, "mixed Laplacian system of degree " + std::to_string(p_) +
                                          " is singular: " + lu_->lastErrorMessage());
}

MixedLaplacianSolver::Solution MixedLaplacianSolver::solve(const Eigen::VectorXd& f) const {
  if (f.size() != n_u_)
    throw Error(ErrorCode::shape, "right-hand side has the wrong length for degree " +
                                      std::to_string(p_));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(system_.rows());
  rhs.segment(n_sigma_, n_u_) = metric_->mass(p_) * f;
  Solution out;
  const double rhs_norm = rhs.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(system_.rows());
  if (rhs_norm > 0.0) {
    x = lu_->solve(rhs);
    Eigen::VectorXd r = rhs - system_ * x;
    double rel = r.norm() / rhs_norm;
    int steps = 0;
    while (rel > tolerance_ && steps < 5) {
      x += lu_->solve(r);
      r = rhs - system_ * x;
      const double next = r.norm() / rhs_norm;
      ++steps;
      if (next >= rel) {
        rel = next;
        break;
      }
      rel = next;
    }
    out.relative_residual = rel;
    out.refinement_steps = steps;
    if (!(rel <= 1e3 * tolerance_))
      throw Error(ErrorCode::numerical,
                  "mixed Laplacian solve of degree " + std::to_string(p_) +
                      " did not converge: relative residual " + std::to_string(rel));
  }
  out.sigma = x.head(n_sigma_);
  out.u = x.segment(n_sigma_, n_u_);
  return out;
}

namespace {

// M-orthonormalizes the columns of v in place.
void m_orthonormalize(Eigen::MatrixXd& v, const SparseMatrix& mass) {
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::MatrixXd gram = v.transpose() * (mass * v);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (gram + gram.transpose()));
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::numerical, "subspace iteration lost rank");
    v = llt.matrixU().solve<Eigen::OnTheRight>(v);
  }
}

SpectrumEstimate dense_spectrum(const Laplacian& lap, int count) {
  const SparseMatrix& mass = lap.metric().mass(lap.degree());
  const Eigen::MatrixXd m = Eigen::MatrixXd(mass);
  const Eigen::MatrixXd delta = lap.dense();
  Eigen::MatrixXd k = m * delta;
  k = 0.5 * (k + k.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::numerical, "dense generalized eigensolve failed");
  SpectrumEstimate out;
  out.dense = true;
  const Eigen::Index take = std::min<Eigen::Index>(count, k.rows());
  out.values = es.eigenvalues().head(take);
  out.vectors = es.eigenvectors().leftCols(take);
  out.lambda_max = es.eigenvalues().size() ? es.eigenvalues().maxCoeff() : 0.0;
  m_orthonormalize(out.vectors, mass);
  return out;
}

double power_lambda_max(const Laplacian& lap, std::mt19937_64& rng) {
  const SparseMatrix& mass = lap.metric().mass(lap.degree());
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(mass.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    v /= std::sqrt(v.dot(mass * v));
    const Eigen::VectorXd w = lap.apply(v);
    lambda = v.dot(mass * w);
    v = w;
  }
  return lambda;
}

}  // namespace

SpectrumEstimate lowest_eigenpairs(const Laplacian& lap, int count, int converge_count,
                                   std::uint64_t seed, Eigen::Index dense_limit) {
  const SparseMatrix& mass = lap.metric().mass(lap.degree());
  const Eigen::Index n = mass.rows();
  if (count <= 0) throw Error(ErrorCode::parameter, "eigenpair count must be positive");
  if (n <= dense_limit || count + 2 >= n) return dense_spectrum(lap, count);

  std::mt19937_64 rng(seed);
  SpectrumEstimate out;
  out.lambda_max = power_lambda_max(lap, rng);
  const double shift = 1e-6 * out.lambda_max;
  const MixedLaplacianSolver shifted(lap, shift);

  const int block = count + 2;
  std::normal_distribution<double> normal;
  Eigen::MatrixXd v(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) v(i, j) = normal(rng);
  m_orthonormalize(v, mass);

  Eigen::VectorXd previous = Eigen::VectorXd::Constant(block, -1.0);
  Eigen::VectorXd theta;
  const int max_iterations = 500;
  int it = 0;
  for (; it < max_iterations; ++it) {
    Eigen::MatrixXd w(n, block);
    for (Eigen::Index j = 0; j < block; ++j) w.col(j) = shifted.solve(v.col(j)).u;
    m_orthonormalize(w, mass);
    Eigen::MatrixXd dw(n, block);
    for (Eigen::Index j = 0; j < block; ++j) dw.col(j) = lap.apply(w.col(j));
    Eigen::MatrixXd a = w.transpose() * (mass * dw);
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    theta = es.eigenvalues();
    v = w * es.eigenvectors();
    bool settled = it >= 5;
    for (int i = 0; i < converge_count && settled; ++i)
      settled = std::abs(theta[i] - previous[i]) <=
                1e-13 * out.lambda_max + 1e-10 * std::abs(theta[i]);
    previous = theta;
    if (settled) break;
  }
  out.iterations = it + 1;
  out.values = theta.head(count);
  out.vectors = v.leftCols(count);
  return out;
}

}  // namespace hodgekit
