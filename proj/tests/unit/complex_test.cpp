#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "helpers.hpp"
#include "hodgekit/complex.hpp"

namespace hodgekit {
namespace {

Eigen::MatrixXd ring_vertices(int n) {
  Eigen::MatrixXd v(n, 2);
  for (int i = 0; i < n; ++i) v.row(i) << std::cos(2 * M_PI * i / n), std::sin(2 * M_PI * i / n);
  return v;
}

std::vector<Simplex> cycle(int n) {
  std::vector<Simplex> e;
  for (int i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
  return e;
}

// Oracle: rank through a floating-point full-pivot LU; entries are small
// integers so the rank is unambiguous.
int dense_rank(const IntMatrix& m) {
  Eigen::MatrixXd d = Eigen::MatrixXd(m.cast<double>());
  if (d.size() == 0) return 0;
  return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(d).rank());
}

bool is_zero(const IntMatrix& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (IntMatrix::InnerIterator it(m, k); it; ++it)
      if (it.value() != 0) return false;
  return true;
}

Eigen::MatrixXd octahedron_vertices() {
  Eigen::MatrixXd v(6, 3);
  v << 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1;
  return v;
}

std::vector<Simplex> octahedron_faces() {
  return {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
}

TEST(Complex, EdgeColumnsFollowAlternatingSigns) {
  const auto c = build_complex(ring_vertices(4), cycle(4));
  const Eigen::MatrixXi b = Eigen::MatrixXi(c->boundary(1));
  for (std::size_t e = 0; e < c->count(1); ++e) {
    const Simplex& s = c->simplices(1)[e];
    ASSERT_LT(s[0], s[1]);
    // top simplices carry the coherent orientation on top of the sorted tuple
    const int o = c->orientation(e);
    EXPECT_EQ(b(s[0], static_cast<int>(e)), -o);
    EXPECT_EQ(b(s[1], static_cast<int>(e)), o);
    EXPECT_EQ(b.col(static_cast<int>(e)).cwiseAbs().sum(), 2);
  }
  // coherent: the edges add up to a cycle
  EXPECT_EQ(b.rowwise().sum().cwiseAbs().sum(), 0);
  // the input ran 0->1->2->3->0, so the wrap-around edge {0, 3} is reversed
  EXPECT_EQ(c->orientation(c->find({0, 3})) * c->orientation(c->find({0, 1})), -1);
}

TEST(Complex, LoneEdgeIsNotClosed) {
  Eigen::MatrixXd v(2, 1);
  v << 0, 1;
  EXPECT_HODGE_ERROR(build_complex(v, {{0, 1}}), topology);
}

TEST(Complex, TriangleBoundaryRank) {
  const auto c = build_complex(ring_vertices(3), cycle(3));
  EXPECT_EQ(c->count(0), 3u);
  EXPECT_EQ(c->count(1), 3u);
  EXPECT_EQ(c->boundary_rank(1), dense_rank(c->boundary(1)));
  EXPECT_EQ(c->boundary_rank(1), 2);
}

TEST(Complex, OctahedronBoundaries) {
  const auto c = build_complex(octahedron_vertices(), octahedron_faces());
  EXPECT_EQ(c->count(0), 6u);
  EXPECT_EQ(c->count(1), 12u);
  EXPECT_EQ(c->count(2), 8u);
  EXPECT_TRUE(is_zero(c->boundary(1) * c->boundary(2)));
  EXPECT_EQ(dense_rank(c->boundary(2)), 7);
  EXPECT_EQ(c->boundary_rank(2), 7);
  EXPECT_EQ(c->betti_numbers(), (std::vector<int>{1, 0, 1}));
}

TEST(Complex, IndicatorCoboundaryOnFourCycle) {
  const auto c = build_complex(ring_vertices(4), cycle(4));
  for (Index v = 0; v < 4; ++v) {
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(4);
    ind[v] = 1.0;
    const Cochain dv = apply_d(*c, make_cochain(*c, 0, ind));
    // hand enumeration: tail of an edge gets -1, head +1
    for (std::size_t e = 0; e < c->count(1); ++e) {
      const Simplex& s = c->simplices(1)[e];
      const double o = c->orientation(e);
      const double expect = s[0] == v ? -o : (s[1] == v ? o : 0.0);
      EXPECT_EQ(dv.values()[static_cast<Eigen::Index>(e)], expect);
    }
  }
}

TEST(Complex, ConstantsAndZeroAreClosed) {
  const auto c = build_complex(ring_vertices(4), cycle(4));
  EXPECT_TRUE(apply_d(*c, make_cochain(*c, 0, Eigen::VectorXd::Ones(4))).values().isZero(0.0));
  EXPECT_TRUE(apply_d(*c, cochain_zero(*c, 0)).values().isZero(0.0));
  const auto t = corpus::flat_torus(4);
  EXPECT_TRUE(apply_d(*t, cochain_zero(*t, 1)).values().isZero(0.0));
}

TEST(Complex, CoboundaryDegreeRange) {
  const auto c = corpus::flat_torus(4);
  EXPECT_NO_THROW(coboundary(*c, 0));
  EXPECT_NO_THROW(coboundary(*c, 1));
  EXPECT_HODGE_ERROR(coboundary(*c, 2), degree);
  EXPECT_HODGE_ERROR(coboundary(*c, -1), degree);
}

TEST(Complex, CoboundaryIsTransposedBoundary) {
  const auto c = corpus::sphere(1);
  for (int p = 0; p < 2; ++p) {
    const Eigen::MatrixXi d = Eigen::MatrixXi(coboundary(*c, p));
    const Eigen::MatrixXi b = Eigen::MatrixXi(c->boundary(p + 1));
    EXPECT_EQ(d, b.transpose());
  }
  EXPECT_TRUE(is_zero(coboundary(*c, 1) * coboundary(*c, 0)));
}

TEST(Complex, CorpusBettiNumbers) {
  for (const std::string& name : corpus::names())
    EXPECT_EQ(corpus::by_name(name)->betti_numbers(), corpus::expected_betti(name)) << name;
}

TEST(Complex, CorpusBoundariesComposeToZero) {
  for (const std::string& name : corpus::names()) {
    const auto c = corpus::by_name(name);
    for (int p = 1; p < c->dimension(); ++p)
      EXPECT_TRUE(is_zero(c->boundary(p) * c->boundary(p + 1))) << name;
  }
}

TEST(Complex, BuildIsDeterministic) {
  const auto a = build_complex(octahedron_vertices(), octahedron_faces());
  const auto b = build_complex(octahedron_vertices(), octahedron_faces());
  EXPECT_EQ(a->id(), b->id());
  for (int p = 1; p <= 2; ++p)
    EXPECT_EQ(Eigen::MatrixXi(a->boundary(p)), Eigen::MatrixXi(b->boundary(p)));
}

TEST(Complex, RejectsDuplicateTop) {
  auto faces = octahedron_faces();
  faces.push_back(faces.front());
  EXPECT_HODGE_ERROR(build_complex(octahedron_vertices(), faces), topology);
}

TEST(Complex, RejectsOpenSurface) {
  auto faces = octahedron_faces();
  faces.pop_back();
  try {
    build_complex(octahedron_vertices(), faces);
    FAIL() << "open surface accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::topology);
    // the message names an edge of the removed face {0, 3, 5} with one coface
    const std::string msg = e.what();
    EXPECT_NE(msg.find("has 1 cofaces"), std::string::npos) << msg;
    EXPECT_TRUE(msg.find("3") != std::string::npos || msg.find("5") != std::string::npos) << msg;
  }
}

TEST(Complex, RejectsProjectivePlane) {
  // 6-vertex triangulation of RP^2: closed but not orientable
  const std::vector<Simplex> faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 1},
                                      {1, 2, 4}, {2, 3, 5}, {3, 4, 1}, {4, 5, 2}, {5, 1, 3}};
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(6, 3);
  EXPECT_HODGE_ERROR(build_complex(v, faces), topology);
}

TEST(Complex, RejectsBadIndicesAndRepeats) {
  EXPECT_HODGE_ERROR(build_complex(ring_vertices(3), {{0, 1}, {1, 2}, {2, 7}}), shape);
  EXPECT_HODGE_ERROR(build_complex(ring_vertices(3), {{0, 0}, {1, 2}, {2, 0}}), shape);
}

TEST(Complex, OrientationIndependentOfInputOrder) {
  // Reversing every triangle flips all orientations but keeps the geometry.
  auto faces = octahedron_faces();
  for (auto& f : faces) std::swap(f[0], f[1]);
  const auto c = build_complex(octahedron_vertices(), faces);
  EXPECT_TRUE(is_zero(c->boundary(1) * c->boundary(2)));
  EXPECT_EQ(c->betti_numbers(), (std::vector<int>{1, 0, 1}));
}

TEST(Complex, RandomRelabelingKeepsInvariants) {
  std::mt19937 gen(11);
  const auto base = corpus::flat_torus(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Index> perm(base->count(0));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    Eigen::MatrixXd v(base->vertices().rows(), base->vertices().cols());
    for (std::size_t i = 0; i < perm.size(); ++i)
      v.row(perm[i]) = base->vertices().row(static_cast<Eigen::Index>(i));
    std::vector<Simplex> faces;
    for (const Simplex& f : base->simplices(2)) {
      Simplex g = {perm[f[0]], perm[f[1]], perm[f[2]]};
      std::rotate(g.begin(), g.begin() + trial % 3, g.end());  // even permutation
      faces.push_back(g);
    }
    const auto c = build_complex(v, faces, base->period());
    EXPECT_TRUE(is_zero(c->boundary(1) * c->boundary(2)));
    EXPECT_EQ(c->betti_numbers(), (std::vector<int>{1, 2, 1}));
  }
}

TEST(IntegerRank, MatchesDenseRankOnRandomMatrices) {
  std::mt19937 gen(3);
  std::uniform_int_distribution<int> entry(-2, 2), size(1, 9), keep(0, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = size(gen), c = size(gen);
    Eigen::MatrixXi m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = keep(gen) ? 0 : entry(gen);
    if (trial % 4 == 0 && c > 1) m.col(c - 1) = m.col(0) * 2 - m.col(c / 2);  // force dependence
    const IntMatrix s = m.sparseView();
    EXPECT_EQ(integer_rank(s), dense_rank(s)) << m;
  }
}

TEST(Cochain, AxpyIdentities) {
  const auto c = corpus::flat_torus(3);
  const Cochain x = make_cochain(*c, 1, Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(c->count(1)), -1, 2));
  const Cochain y = make_cochain(*c, 1, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(c->count(1)), 0.5));
  EXPECT_EQ(cochain_axpy(0.0, x, y).values(), y.values());
  EXPECT_EQ(cochain_axpy(1.0, x, cochain_zero(*c, 1)).values(), x.values());
  EXPECT_EQ(cochain_axpy(2.0, x, x).values(), (3.0 * x.values()).eval());
}

TEST(Cochain, ShapeErrors) {
  const auto c = corpus::flat_torus(3);
  const auto other = corpus::flat_torus(4);
  EXPECT_HODGE_ERROR(cochain_axpy(1.0, cochain_zero(*c, 0), cochain_zero(*c, 1)), shape);
  EXPECT_HODGE_ERROR(cochain_axpy(1.0, cochain_zero(*c, 1), cochain_zero(*other, 1)), shape);
  EXPECT_HODGE_ERROR(make_cochain(*c, 1, Eigen::VectorXd::Zero(3)), shape);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c->count(0)));
  bad[0] = std::nan("");
  EXPECT_HODGE_ERROR(make_cochain(*c, 0, bad), shape);
  EXPECT_HODGE_ERROR(cochain_zero(*c, 3), degree);
}

}  // namespace
}  // namespace hodgekit
