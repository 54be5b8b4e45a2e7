#include <gtest/gtest.h>

#include "helpers.hpp"
#include "hodgekit/norms.hpp"
#include "hodgekit/torus_oracle.hpp"

namespace hodgekit {
namespace {

using testing::corpus_system;

Cochain sin_x_dy(const HodgeSystem& sys) {
  return oracle::sample_to_cochain(oracle::registry_form("sin_x_dy"), sys.complex());
}

TEST(Norms, SobolevZeroIsL2) {
  const HodgePtr sys = corpus_system("sphere1");
  for (int p = 0; p <= 2; ++p) {
    const Cochain w = random_cochain(sys->complex(), p, 1);
    EXPECT_NEAR(sobolev_norm(*sys, w, 0), l2_norm(sys->metric(), w), 1e-13 * l2_norm(sys->metric(), w));
  }
}

TEST(Norms, ZeroCochainHasZeroNorms) {
  const HodgePtr sys = corpus_system("torus8");
  for (int p = 0; p <= 2; ++p) {
    const Cochain z = cochain_zero(sys->complex(), p);
    for (int s = 0; s <= 4; ++s) EXPECT_EQ(sobolev_norm(*sys, z, s), 0.0);
    for (int k = 0; k <= 3; ++k) EXPECT_EQ(ck_norm(sys->metric(), z, k), 0.0);
  }
}

TEST(Norms, SobolevOfUnitEigenform) {
  // ||w||_{H^s}^2 = (1 + 1)^s ||w||^2 for Delta w = w
  const HodgePtr sys = corpus_system("torus32");
  const Cochain w = sin_x_dy(*sys);
  const double l2 = l2_norm(sys->metric(), w);
  EXPECT_NEAR(l2 * l2, 2 * M_PI * M_PI, 0.01 * 2 * M_PI * M_PI);
  // higher s amplifies the O(h^2) high-frequency content of the sampled form
  for (int s = 0; s <= 3; ++s) {
    const double h = sobolev_norm(*sys, w, s);
    EXPECT_NEAR(h * h / (l2 * l2), std::pow(2.0, s), 0.01 * std::pow(2.0, s)) << s;
  }
}

TEST(Norms, SobolevMatchesFourierOracle) {
  const HodgePtr sys = corpus_system("torus32");
  const auto form = oracle::registry_form("mix1");
  const Cochain w = oracle::sample_to_cochain(form, sys->complex());
  for (int s = 0; s <= 2; ++s)
    EXPECT_NEAR(sobolev_norm(*sys, w, s) / oracle::spectral_sobolev_norm(form, s), 1.0, 0.05) << s;
}

TEST(Norms, CkOfConstantsAndSine) {
  for (const std::string& name : {"circle64", "torus8", "sphere1"}) {
    const HodgePtr sys = corpus_system(name);
    const auto n0 = static_cast<Eigen::Index>(sys->complex().count(0));
    const Cochain c = make_cochain(sys->complex(), 0, Eigen::VectorXd::Constant(n0, -2.5));
    for (int k = 0; k <= 3; ++k) EXPECT_NEAR(ck_norm(sys->metric(), c, k), 2.5, 1e-10) << name << k;
  }
  const HodgePtr sys = corpus_system("torus32");
  const Cochain s = oracle::sample_to_cochain(oracle::registry_form("sin_x"), sys->complex());
  const double c0 = ck_norm(sys->metric(), s, 0);
  EXPECT_GE(c0, 0.95);
  EXPECT_LE(c0, 1.0 + 1e-12);
  // C^1 adds the sup of d(sin x), close to the sup of |cos x| = 1
  EXPECT_NEAR(ck_norm(sys->metric(), s, 1) - c0, 1.0, 0.05);
}

TEST(Norms, CkVolumeNormalizationConvergesToSup) {
  // cos x dx dy has sup 1; normalized triangle averages approach it
  std::vector<double> gaps;
  for (const std::string& name : {"torus8", "torus16", "torus32"}) {
    const HodgePtr sys = corpus_system(name);
    const Cochain w = oracle::sample_to_cochain(oracle::registry_form("cos_x_dxdy"), sys->complex());
    gaps.push_back(1.0 - ck_norm(sys->metric(), w, 0));
  }
  EXPECT_GT(gaps[0], gaps[1]);
  EXPECT_GT(gaps[1], gaps[2]);
  EXPECT_GE(gaps[2], 0.0);
  EXPECT_LT(gaps[2], 0.01);
}

TEST(Norms, NegativeParametersRejected) {
  const HodgePtr sys = corpus_system("torus8");
  const Cochain w = random_cochain(sys->complex(), 1, 2);
  EXPECT_HODGE_ERROR(sobolev_norm(*sys, w, -1), parameter);
  EXPECT_HODGE_ERROR(ck_norm(sys->metric(), w, -1), parameter);
  EXPECT_HODGE_ERROR(estimate_green_operator_norm(*sys, 1, 2, 0, 7), parameter);
  EXPECT_HODGE_ERROR(estimate_green_operator_norm(*sys, 1, 1, 5, 7), parameter);
  EXPECT_HODGE_ERROR(estimate_green_operator_norm(*sys, 3, 2, 5, 7), degree);
}

TEST(Norms, Properties) {
  for (const std::string& name : {"torus8", "sphere1", "circle64"}) {
    const HodgePtr sys = corpus_system(name);
    const MetricStructure& m = sys->metric();
    for (int p = 0; p <= sys->dimension(); ++p) {
      for (int trial = 0; trial < 5; ++trial) {
        const auto stream = static_cast<std::uint64_t>(10 * p + trial);
        const Cochain x = random_cochain(sys->complex(), p, 91, stream);
        const Cochain y = random_cochain(sys->complex(), p, 92, stream);
        const double a = -1.75;
        for (int s = 0; s <= 3; ++s) {
          const double nx = sobolev_norm(*sys, x, s);
          EXPECT_GT(nx, 0.0);
          EXPECT_LE(nx, sobolev_norm(*sys, x, s + 1) * (1 + 1e-10)) << name << p << s;
          EXPECT_NEAR(sobolev_norm(*sys, a * x, s), std::abs(a) * nx, 1e-12 * std::abs(a) * nx);
          EXPECT_LE(sobolev_norm(*sys, x + y, s), (nx + sobolev_norm(*sys, y, s)) * (1 + 1e-12));
        }
        for (int k = 0; k <= 2; ++k) {
          const double cx = ck_norm(m, x, k);
          EXPECT_GT(cx, 0.0);
          EXPECT_NEAR(ck_norm(m, a * x, k), std::abs(a) * cx, 1e-12 * std::abs(a) * cx);
          EXPECT_LE(ck_norm(m, x + y, k), (cx + ck_norm(m, y, k)) * (1 + 1e-12));
          EXPECT_LE(ck_norm(m, x, k), ck_norm(m, x, k + 1));
        }
      }
    }
  }
}

TEST(Norms, ReportsCarryResolution) {
  const HodgePtr sys = corpus_system("torus8");
  const Cochain w = random_cochain(sys->complex(), 1, 3);
  const NormReport r = sobolev_report(*sys, w, 2);
  EXPECT_EQ(r.family, NormFamily::sobolev);
  EXPECT_EQ(r.parameter, 2);
  EXPECT_DOUBLE_EQ(r.value, sobolev_norm(*sys, w, 2));
  EXPECT_EQ(r.resolution, resolution_tag(sys->complex()));
  EXPECT_NE(r.resolution.find("64x192x128"), std::string::npos);
  const NormReport c = ck_report(sys->metric(), w, 1);
  EXPECT_EQ(c.family, NormFamily::ck);
  EXPECT_EQ(to_string(NormFamily::l2), "L2");
}

TEST(GreenNorm, UnitEigenformRatioIsTwo) {
  const HodgePtr sys = corpus_system("torus32");
  const Cochain w = sin_x_dy(*sys);
  for (int s = 2; s <= 4; ++s) EXPECT_NEAR(green_norm_ratio(*sys, w, s), 2.0, 0.02) << s;
  EXPECT_EQ(green_norm_ratio(*sys, cochain_zero(sys->complex(), 1), 2), 0.0);
}

TEST(GreenNorm, EstimateDeterministicAndMonotone) {
  const HodgePtr sys = corpus_system("torus8");
  const GreenNormEstimate a = estimate_green_operator_norm(*sys, 1, 2, 20, 7);
  const GreenNormEstimate b = estimate_green_operator_norm(*sys, 1, 2, 20, 7);
  EXPECT_EQ(a.ratios, b.ratios);
  EXPECT_EQ(a.estimate, b.estimate);
  ASSERT_EQ(a.running_max.size(), 20u);
  for (std::size_t i = 1; i < 20; ++i) EXPECT_GE(a.running_max[i], a.running_max[i - 1]);
  EXPECT_EQ(a.running_max.back(), a.estimate);
  // a shorter run is a prefix of the longer one
  const GreenNormEstimate prefix = estimate_green_operator_norm(*sys, 1, 2, 8, 7);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(prefix.ratios[i], a.ratios[i]);
  const GreenNormEstimate other = estimate_green_operator_norm(*sys, 1, 2, 20, 8);
  EXPECT_NE(other.ratios, a.ratios);
  for (double r : a.ratios) EXPECT_GT(r, 0.0);
}

TEST(NormChain, SineFormOnTorus) {
  const HodgePtr sys = corpus_system("torus16");
  const NormChain c = norm_chain_probe(*sys, sin_x_dy(*sys), 0, 2);
  for (double v : {c.ck_green, c.hs_green, c.hs2_omega, c.cs2_omega}) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  ASSERT_TRUE(c.ratio_ck_hs && c.ratio_hs_hs2 && c.ratio_hs2_cs2);
  // the chain composes exactly
  EXPECT_NEAR(*c.ratio_ck_hs * *c.ratio_hs_hs2 * *c.ratio_hs2_cs2 * c.cs2_omega, c.ck_green,
              1e-12 * c.ck_green);
}

TEST(NormChain, ZeroCochainLeavesRatiosUndefined) {
  const HodgePtr sys = corpus_system("torus8");
  const NormChain c = norm_chain_probe(*sys, cochain_zero(sys->complex(), 1), 0, 2);
  EXPECT_EQ(c.ck_green, 0.0);
  EXPECT_EQ(c.cs2_omega, 0.0);
  EXPECT_FALSE(c.ratio_ck_hs);
  EXPECT_FALSE(c.ratio_hs_hs2);
  EXPECT_FALSE(c.ratio_hs2_cs2);
}

TEST(NormChain, HypothesisEnforced) {
  const HodgePtr sys = corpus_system("torus8");
  const Cochain w = random_cochain(sys->complex(), 1, 4);
  try {
    norm_chain_probe(*sys, w, 1, 2);  // needs s > 2
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::hypothesis);
    EXPECT_NE(std::string(e.what()).find('>'), std::string::npos);
  }
  EXPECT_NO_THROW(norm_chain_probe(*sys, w, 1, 3));
  EXPECT_HODGE_ERROR(norm_chain_probe(*corpus_system("circle64"), random_cochain(*corpus::circle(64), 0, 1), 0, 1),
                     parameter);
}

TEST(NormChain, ComposesForRandomExactCochains) {
  const HodgePtr sys = corpus_system("torus8");
  for (int trial = 0; trial < 5; ++trial) {
    const Cochain f = random_cochain(sys->complex(), 0, 5, static_cast<std::uint64_t>(trial));
    const Cochain w = apply_d(sys->complex(), f);
    for (auto [k, s] : {std::pair{0, 2}, std::pair{1, 3}, std::pair{2, 4}}) {
      const NormChain c = norm_chain_probe(*sys, w, k, s);
      ASSERT_TRUE(c.ratio_ck_hs && c.ratio_hs_hs2 && c.ratio_hs2_cs2);
      const double k_prod = *c.ratio_ck_hs * *c.ratio_hs_hs2 * *c.ratio_hs2_cs2;
      EXPECT_LE(c.ck_green, k_prod * c.cs2_omega * (1 + 1e-12));
      EXPECT_NEAR(ck_norm(sys->metric(), green(*sys, w), k), c.ck_green, 1e-12 * c.ck_green);
    }
  }
}

TEST(NormChain, RatiosStableUnderRefinement) {
  std::vector<NormChain> chains;
  for (const std::string& name : {"torus8", "torus16", "torus32"}) {
    const HodgePtr sys = corpus_system(name);
    chains.push_back(norm_chain_probe(*sys, sin_x_dy(*sys), 0, 2));
  }
  auto spread = [&](auto get) {
    double lo = INFINITY, hi = 0.0;
    for (const NormChain& c : chains) {
      lo = std::min(lo, *get(c));
      hi = std::max(hi, *get(c));
    }
    return hi / lo;
  };
  EXPECT_LT(spread([](const NormChain& c) { return c.ratio_ck_hs; }), 4.0);
  EXPECT_LT(spread([](const NormChain& c) { return c.ratio_hs_hs2; }), 4.0);
  EXPECT_LT(spread([](const NormChain& c) { return c.ratio_hs2_cs2; }), 4.0);
}

TEST(RandomCochain, SeededStreams) {
  const auto c = corpus::flat_torus(4);
  EXPECT_EQ(random_cochain(*c, 1, 3, 2).values(), random_cochain(*c, 1, 3, 2).values());
  EXPECT_NE(random_cochain(*c, 1, 3, 2).values(), random_cochain(*c, 1, 3, 3).values());
  EXPECT_NE(random_cochain(*c, 1, 3, 2).values(), random_cochain(*c, 1, 4, 2).values());
  EXPECT_EQ(random_cochain(*c, 1, 3).size(), 48);
}

}  // namespace
}  // namespace hodgekit
