#include "hodgekit/geometry.hpp"

#include <cmath>
#include <vector>

#include <Eigen/LU>

#include "hodgekit/errors.hpp"

namespace hodgekit::geometry {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Eigen::MatrixXd edge_gram(const Eigen::MatrixXd& coords) {
  const auto n = coords.rows() - 1;
  Eigen::MatrixXd e(coords.cols(), n);
  for (Eigen::Index i = 0; i < n; ++i) e.col(i) = (coords.row(i + 1) - coords.row(0)).transpose();
  return e.transpose() * e;
}

void subsets(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    subsets(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

double simplex_volume(const Eigen::MatrixXd& coords) {
  const auto n = static_cast<int>(coords.rows()) - 1;
  if (n == 0) return 1.0;
  const double det = edge_gram(coords).determinant();
  return std::sqrt(std::max(det, 0.0)) / factorial(n);
}

SimplexGeometry simplex_geometry(const Eigen::MatrixXd& coords) {
  const auto n = static_cast<int>(coords.rows()) - 1;
  SimplexGeometry g;
  g.dimension = n;
  if (n == 0) {
    g.volume = 1.0;
    g.gradient_gram = Eigen::MatrixXd::Zero(1, 1);
    return g;
  }
  const Eigen::MatrixXd gram = edge_gram(coords);
  double longest = 0.0;
  for (Eigen::Index i = 0; i < coords.rows(); ++i)
    for (Eigen::Index j = i + 1; j < coords.rows(); ++j)
      longest = std::max(longest, (coords.row(i) - coords.row(j)).norm());
  g.volume = std::sqrt(std::max(gram.determinant(), 0.0)) / factorial(n);
  if (!(g.volume > 1e-12 * std::pow(longest, n)))
    throw Error(ErrorCode::geometry, "degenerate " + std::to_string(n) + "-simplex (volume " +
                                         std::to_string(g.volume) + ")");
  // grad(l_i) for i >= 1 has Gram matrix gram^{-1}; grad(l_0) = -sum_i grad(l_i).
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n + 1);
  c.col(0).setConstant(-1.0);
  c.rightCols(n).setIdentity();
  g.gradient_gram = c.transpose() * gram.inverse() * c;
  return g;
}

Eigen::MatrixXd whitney_local_mass(const SimplexGeometry& g, int p) {
  const int n = g.dimension;
  std::vector<std::vector<int>> faces;
  std::vector<int> cur;
  subsets(n + 1, p + 1, 0, cur, faces);
  const auto m = static_cast<Eigen::Index>(faces.size());
  // Integral of l_a * l_b over the simplex.
  const double denom = static_cast<double>((n + 1) * (n + 2));
  auto lambda_product = [&](int a, int b) { return g.volume * (a == b ? 2.0 : 1.0) / denom; };
  // <dl_{A} , dl_{B}> for p-element index lists: Gram determinant.
  auto wedge_inner = [&](const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty()) return 1.0;
    Eigen::MatrixXd m(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r)
      for (std::size_t s = 0; s < b.size(); ++s) m(r, s) = g.gradient_gram(a[r], b[s]);
    return m.determinant();
  };
  const double scale = factorial(p) * factorial(p);
  Eigen::MatrixXd mass(m, m);
  for (Eigen::Index f = 0; f < m; ++f)
    for (Eigen::Index h = f; h < m; ++h) {
      const auto& F = faces[f];
      const auto& H = faces[h];
      double sum = 0.0;
      for (std::size_t j = 0; j <= static_cast<std::size_t>(p); ++j)
        for (std::size_t k = 0; k <= static_cast<std::size_t>(p); ++k) {
          std::vector<int> fr, hr;
          for (std::size_t r = 0; r <= static_cast<std::size_t>(p); ++r) {
            if (r != j) fr.push_back(F[r]);
            if (r != k) hr.push_back(H[r]);
          }
          const double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
          sum += sign * lambda_product(F[j], H[k]) * wedge_inner(fr, hr);
        }
      mass(f, h) = mass(h, f) = scale * sum;
    }
  return mass;
}

Eigen::Vector3d triangle_cotangents(const Eigen::MatrixXd& coords) {
  Eigen::Vector3d cot;
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd u = (coords.row((k + 1) % 3) - coords.row(k)).transpose();
    const Eigen::VectorXd v = (coords.row((k + 2) % 3) - coords.row(k)).transpose();
    const double dot = u.dot(v);
    const double cross = std::sqrt(std::max(u.squaredNorm() * v.squaredNorm() - dot * dot, 0.0));
    cot[k] = dot / cross;
  }
  return cot;
}

}  // namespace hodgekit::geometry
