#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "helpers.hpp"
#include "hodgekit/geometry.hpp"
#include "hodgekit/metric.hpp"
#include "hodgekit/norms.hpp"
#include "hodgekit/torus_oracle.hpp"

namespace hodgekit {
namespace {

using testing::m_norm;

TEST(Metric, DualLengthsOfSegmentMeshes) {
  const Eigen::VectorXd two = dual_vertex_lengths(3, {{0, 1}, {1, 2}}, {1.0, 1.0});
  EXPECT_EQ(two, Eigen::Vector3d(0.5, 1.0, 0.5));
  const Eigen::VectorXd unit = dual_vertex_lengths(3, {{0, 1}, {1, 2}}, {0.5, 0.5});
  EXPECT_EQ(unit, Eigen::Vector3d(0.25, 0.5, 0.25));
  EXPECT_HODGE_ERROR(dual_vertex_lengths(2, {{0, 1}, {1, 2}}, {1.0, 1.0}), shape);
}

TEST(Metric, LumpedCircleStars) {
  const auto ring = corpus::circle(9);
  const auto m = build_metric(ring, MetricScheme::lumped);
  const double chord = 2.0 * std::sin(M_PI / 9);
  const Eigen::VectorXd s0 = m->diagonal_star(0), s1 = m->diagonal_star(1);
  for (Eigen::Index i = 0; i < 9; ++i) {
    EXPECT_NEAR(s0[i], chord, 1e-14);  // half of each neighbouring chord
    EXPECT_NEAR(s1[i], 1.0 / chord, 1e-13);
  }
}

TEST(Metric, ConstantNormOnCircleIsPerimeter) {
  const auto ring = corpus::circle(64);
  double perimeter = 0.0;
  for (Eigen::Index i = 0; i < 64; ++i)
    perimeter += (ring->vertices().row((i + 1) % 64) - ring->vertices().row(i)).norm();
  for (auto scheme : {MetricScheme::whitney, MetricScheme::lumped}) {
    const auto m = build_metric(ring, scheme);
    const Cochain one = make_cochain(*ring, 0, Eigen::VectorXd::Ones(64));
    const double n2 = std::pow(l2_norm(*m, one), 2);
    EXPECT_NEAR(n2, perimeter, 1e-12);
    EXPECT_NEAR(n2, 2 * M_PI, 1e-2);
  }
}

TEST(Metric, WhitneyTorusMassSumsToArea) {
  const auto m = build_metric(corpus::flat_torus(8), MetricScheme::whitney);
  EXPECT_NEAR(Eigen::MatrixXd(m->mass(0)).sum(), 4 * M_PI * M_PI, 1e-10);
}

// Oracle for triangle mass matrices: quadrature with the edge-midpoint rule,
// exact for the quadratic integrands that products of Whitney forms give.
Eigen::MatrixXd quadrature_mass(const Eigen::MatrixXd& x, int p) {
  const Eigen::Vector2d e1 = (x.row(1) - x.row(0)).transpose(), e2 = (x.row(2) - x.row(0)).transpose();
  Eigen::Matrix2d jac;
  jac << e1, e2;
  const double area = 0.5 * std::abs(jac.determinant());
  // gradients of barycentrics l1, l2 are rows of jac^{-1}; l0 = -(l1 + l2)
  const Eigen::Matrix2d inv = jac.inverse();
  std::array<Eigen::Vector2d, 3> grad = {-(inv.row(0) + inv.row(1)).transpose(), inv.row(0).transpose(),
                                         inv.row(1).transpose()};
  const std::array<Eigen::Vector3d, 3> pts = {Eigen::Vector3d(0.5, 0.5, 0), Eigen::Vector3d(0, 0.5, 0.5),
                                              Eigen::Vector3d(0.5, 0, 0.5)};
  if (p == 0) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    for (const auto& l : pts) m += l * l.transpose() * area / 3.0;
    return m;
  }
  const std::array<std::array<int, 2>, 3> edges = {{{0, 1}, {0, 2}, {1, 2}}};
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (const auto& l : pts) {
    std::array<Eigen::Vector2d, 3> w;
    for (int e = 0; e < 3; ++e) {
      const int a = edges[e][0], b = edges[e][1];
      w[e] = l[a] * grad[b] - l[b] * grad[a];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) += w[i].dot(w[j]) * area / 3.0;
  }
  return m;
}

TEST(Geometry, WhitneyLocalMassMatchesQuadrature) {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x(3, 2);
    for (int i = 0; i < 3; ++i) x.row(i) << u(gen), u(gen);
    if (geometry::simplex_volume(x) < 0.05) continue;
    const auto g = geometry::simplex_geometry(x);
    for (int p = 0; p <= 1; ++p)
      EXPECT_LT((geometry::whitney_local_mass(g, p) - quadrature_mass(x, p)).norm(), 1e-12);
    EXPECT_NEAR(geometry::whitney_local_mass(g, 2)(0, 0), 1.0 / g.volume, 1e-12);
  }
}

TEST(Geometry, WhitneyIntervalMass) {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 0.7;
  const auto g = geometry::simplex_geometry(x);
  Eigen::Matrix2d p1;
  p1 << 2, 1, 1, 2;
  EXPECT_LT((geometry::whitney_local_mass(g, 0) - p1 * 0.7 / 6).norm(), 1e-15);
  EXPECT_NEAR(geometry::whitney_local_mass(g, 1)(0, 0), 1 / 0.7, 1e-14);
}

TEST(Metric, MassMatricesSymmetricPositiveDefinite) {
  for (const std::string& name : {"circle4", "torus8", "sphere1"}) {
    const auto m = build_metric(corpus::by_name(name), MetricScheme::whitney);
    for (int p = 0; p <= m->dimension(); ++p) {
      const Eigen::MatrixXd d = Eigen::MatrixXd(m->mass(p));
      EXPECT_LE((d - d.transpose()).norm(), 1e-12 * d.norm()) << name << p;
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d).eigenvalues().minCoeff(), 0.0);
      const Cochain x = random_cochain(m->complex(), p, 3);
      EXPECT_GT(inner(*m, x, x), 0.0);
    }
  }
}

TEST(Metric, InnerProductBasics) {
  const auto m = build_metric(corpus::flat_torus(6), MetricScheme::whitney);
  const Cochain x = random_cochain(m->complex(), 1, 1), y = random_cochain(m->complex(), 1, 2);
  EXPECT_NEAR(inner(*m, x, y), inner(*m, y, x), 1e-12 * l2_norm(*m, x) * l2_norm(*m, y));
  EXPECT_EQ(l2_norm(*m, cochain_zero(m->complex(), 1)), 0.0);
  EXPECT_HODGE_ERROR(inner(*m, x, random_cochain(m->complex(), 0, 1)), shape);
}

TEST(Metric, LumpedSchemeNeedsWellCenteredMesh) {
  try {
    build_metric(corpus::flat_torus(4), MetricScheme::lumped);
    FAIL() << "right triangles accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::scheme);
    EXPECT_NE(std::string(e.what()).find("triangle"), std::string::npos);
  }
  EXPECT_NO_THROW(build_metric(corpus::sphere(0), MetricScheme::lumped));
  EXPECT_HODGE_ERROR(build_metric(corpus::sphere(0), MetricScheme::whitney)->diagonal_star(0), scheme);
  EXPECT_HODGE_ERROR(parse_scheme("cotan"), parameter);
}

TEST(Metric, DegenerateSimplexRejected) {
  // tetrahedron surface with vertex 3 at the midpoint of edge 01
  Eigen::MatrixXd v(4, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0.5, 0, 0;
  const auto c = build_complex(v, {{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {0, 2, 3}});
  EXPECT_HODGE_ERROR(build_metric(c, MetricScheme::whitney), geometry);
}

TEST(Metric, AdjointnessDense) {
  for (const std::string& name : {"torus8", "sphere1", "circle64"}) {
    const HodgePtr sys = testing::corpus_system(name);
    const MetricPtr& m = sys->metric_ptr();
    for (int p = 1; p <= m->dimension(); ++p) {
      const Eigen::MatrixXd d = Eigen::MatrixXd(m->d(p - 1));
      const Eigen::MatrixXd delta = codifferential(m, p).dense();
      const Eigen::MatrixXd mp = Eigen::MatrixXd(m->mass(p)), mq = Eigen::MatrixXd(m->mass(p - 1));
      for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd a = random_cochain(m->complex(), p - 1, 9, static_cast<std::uint64_t>(trial)).values();
        const Eigen::VectorXd b = random_cochain(m->complex(), p, 10, static_cast<std::uint64_t>(trial)).values();
        const double lhs = (d * a).dot(mp * b), rhs = a.dot(mq * (delta * b));
        EXPECT_LE(std::abs(lhs - rhs), 1e-10 * m_norm(*m, p - 1, a) * m_norm(*m, p, b)) << name;
      }
    }
  }
}

TEST(Metric, CodifferentialOnZeroFormsIsEmpty) {
  const auto m = build_metric(corpus::flat_torus(4), MetricScheme::whitney);
  EXPECT_EQ(apply_delta(*m, 0, Eigen::VectorXd::Ones(16)).size(), 0);
  EXPECT_HODGE_ERROR(codifferential(m, 3), degree);
}

TEST(Metric, CodifferentialSignOnTorusOracle) {
  // delta(sin x dx) = -d/dx sin x = -cos x on the flat torus
  const auto m = build_metric(corpus::flat_torus(32), MetricScheme::whitney);
  const auto form = oracle::SpectralForm(oracle::FlatManifold::torus, 1).add_sin({1, 0}, 0, 1.0);
  const Cochain w = oracle::sample_to_cochain(form, m->complex());
  const Cochain expect = oracle::sample_to_cochain(oracle::spectral_delta(form), m->complex());
  const Eigen::VectorXd got = apply_delta(*m, 1, w.values());
  EXPECT_GT(got.dot(m->mass(0) * expect.values()), 0.0);
  EXPECT_LT(m_norm(*m, 0, got - expect.values()) / l2_norm(*m, expect), 0.02);
}

TEST(Laplacian, ConstantsAreHarmonic) {
  for (auto scheme : {MetricScheme::whitney, MetricScheme::lumped}) {
    const auto m = build_metric(corpus::sphere(1), scheme);
    EXPECT_LT(laplacian(m, 0).apply(Eigen::VectorXd::Ones(18)).norm(), 1e-12);
  }
}

TEST(Laplacian, SelfAdjointAndEnergyIdentity) {
  for (const std::string& name : {"torus8", "sphere1", "circle64"}) {
    const HodgePtr sys = testing::corpus_system(name);
    const MetricStructure& m = sys->metric();
    for (int p = 0; p <= m.dimension(); ++p) {
      const Laplacian& lap = sys->laplacian(p);
      const Eigen::VectorXd x = random_cochain(m.complex(), p, 4).values();
      const Eigen::VectorXd y = random_cochain(m.complex(), p, 5).values();
      const double xy = lap.apply(x).dot(m.mass(p) * y), yx = x.dot(m.mass(p) * lap.apply(y));
      EXPECT_LE(std::abs(xy - yx), 1e-10 * std::max(std::abs(xy), 1.0)) << name << p;
      double energy = 0.0;
      if (p < m.dimension()) energy += std::pow(m_norm(m, p + 1, m.d(p) * x), 2);
      if (p > 0) energy += std::pow(m_norm(m, p - 1, apply_delta(m, p, x)), 2);
      const double q = lap.apply(x).dot(m.mass(p) * x);
      EXPECT_GE(q, 0.0);
      EXPECT_NEAR(q, energy, 1e-10 * energy) << name << p;
    }
  }
}

TEST(Laplacian, KernelIsClosedAndCoclosed) {
  for (const std::string& name : {"torus8", "sphere1", "circle4"}) {
    const HodgePtr sys = testing::corpus_system(name);
    const MetricStructure& m = sys->metric();
    for (int p = 0; p <= m.dimension(); ++p) {
      // numerical null space of the stacked [d; delta] operator
      const auto rows_d = p < m.dimension() ? m.d(p).rows() : 0;
      const auto rows_delta = p > 0 ? static_cast<Eigen::Index>(m.complex().count(p - 1)) : 0;
      const auto n = static_cast<Eigen::Index>(m.complex().count(p));
      Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(rows_d + rows_delta, n);
      if (rows_d) stacked.topRows(rows_d) = Eigen::MatrixXd(m.d(p));
      if (rows_delta) stacked.bottomRows(rows_delta) = codifferential(sys->metric_ptr(), p).dense();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
      const Eigen::VectorXd sv = svd.singularValues();
      int nullity = static_cast<int>(n - sv.size());
      for (Eigen::Index i = 0; i < sv.size(); ++i) nullity += sv[i] <= 1e-8 * sv[0];
      EXPECT_EQ(nullity, sys->harmonic_matrix(p).cols()) << name << p;
      // containment both ways
      const Eigen::MatrixXd& h = sys->harmonic_matrix(p);
      if (h.cols()) EXPECT_LE((stacked * h).norm(), 1e-8 * sv[0]);
      const Eigen::MatrixXd null = svd.matrixV().rightCols(nullity);
      for (Eigen::Index j = 0; j < null.cols(); ++j)
        EXPECT_LE(sys->laplacian(p).apply(null.col(j)).norm(), 1e-8 * sv[0] * sv[0]);
    }
  }
}

TEST(Laplacian, TorusOracleEigenform) {
  // Delta(sin x dy) = sin x dy; the discrete error shrinks like h^2
  std::vector<double> err;
  for (int n : {8, 16, 32}) {
    const HodgePtr sys = testing::corpus_system("torus" + std::to_string(n));
    const Cochain w = oracle::sample_to_cochain(oracle::registry_form("sin_x_dy"), sys->complex());
    const Eigen::VectorXd lw = sys->laplacian(1).apply(w.values());
    err.push_back(m_norm(sys->metric(), 1, lw - w.values()) / l2_norm(sys->metric(), w));
  }
  EXPECT_LT(err.back(), 0.005);
  EXPECT_GT(err[0] / err[1], 3.5);
  EXPECT_GT(err[1] / err[2], 3.5);
}

}  // namespace
}  // namespace hodgekit
