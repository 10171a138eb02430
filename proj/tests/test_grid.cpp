#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nleig/grid.hpp"
#include "nleig/kernels.hpp"
#include "oracles.hpp"

using namespace nleig;

TEST(Grid, SpacingIsTwoLOverN) {
  const Grid g = make_grid(25.0, 1000);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.05);
  EXPECT_DOUBLE_EQ(g.spacing() * g.size(), 50.0);
}

TEST(Grid, NodesOnSmallGrid) {
  const Grid g = make_grid(1.0, 8);
  const std::vector<double> expected = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75};
  EXPECT_EQ(g.nodes(), expected);
  EXPECT_EQ(g.node(g.origin()), 0.0);
}

TEST(Grid, RejectsBadParameters) {
  try {
    make_grid(25.0, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OddPointCount);
  }
  try {
    make_grid(0.0, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveLength);
  }
  EXPECT_THROW(make_grid(1.0, 6), Error);
}

TEST(Grid, MirrorAndFrequencies) {
  const Grid g = make_grid(2.0, 16);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_EQ(g.mirror(g.mirror(j)), j);
    if (j != 0) EXPECT_DOUBLE_EQ(g.node(g.mirror(j)), -g.node(j));
  }
  EXPECT_DOUBLE_EQ(g.frequency(1), std::numbers::pi / 2.0);
}

TEST(Profile, RejectsNonFiniteAndWrongLength) {
  const Grid g = make_grid(1.0, 8);
  EXPECT_THROW(Profile(g, std::vector<double>(7, 0.0)), Error);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  try {
    Profile p(g, v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFinite);
  }
}

TEST(InnerProduct, ConstantOnes) {
  const Grid g = make_grid(1.0, 8);
  const Profile one = Profile::constant(g, 1.0);
  EXPECT_DOUBLE_EQ(inner_product(one, one), 2.0);
  EXPECT_EQ(inner_product(one, Profile::zeros(g)), 0.0);
}

TEST(InnerProduct, CosineSquaredIntegral) {
  const Grid g = make_grid(1.0, 64);
  const Profile c = Profile::sample(g, [](double x) { return std::cos(std::numbers::pi * x); });
  EXPECT_NEAR(inner_product(c, c), 1.0, 1e-12);
}

TEST(InnerProduct, GridMismatch) {
  const Profile a = Profile::constant(make_grid(1.0, 8), 1.0);
  const Profile b = Profile::constant(make_grid(1.0, 16), 1.0);
  try {
    inner_product(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Convolve, UnitMassKernelOnConstant) {
  const Grid g = make_grid(25.0, 4000);
  const Kernel b = indicator_kernel(g);
  const Profile out = convolve(b.profile, Profile::constant(g, 1.0));
  for (double v : out.values()) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Convolve, IndicatorSquaredIsTent) {
  const Grid g = make_grid(4.0, 256);
  const Kernel b = indicator_kernel(g);
  const Profile tent = convolve(b.profile, b.profile);
  const std::vector<double> direct = oracle::direct_convolution(b.profile, b.profile);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    EXPECT_NEAR(tent[j], std::max(0.0, 1.0 - std::abs(x)), g.spacing());
    EXPECT_NEAR(tent[j], direct[j], 1e-12);
  }
}

TEST(Convolve, ZeroInput) {
  const Grid g = make_grid(25.0, 1000);
  const Kernel b = gaussian_kernel(g, 1.0);
  EXPECT_EQ(sup_norm(convolve(b.profile, Profile::zeros(g))), 0.0);
}

TEST(Convolve, MatchesDirectSumOnRandomProfiles) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {16u, 64u, 128u, 256u}) {
    const Grid g = make_grid(8.0, n);
    for (int trial = 0; trial < 10; ++trial) {
      const Profile k = oracle::random_cone_profile(g, rng);
      const Profile w = oracle::random_cone_profile(g, rng);
      const Profile fast = convolve(k, w);
      const Profile slow(g, oracle::direct_convolution(k, w));
      EXPECT_LE(l2_distance(fast, slow), 1e-10 * l2_norm(slow));
    }
  }
}

TEST(Convolve, CommutesWithTranslation) {
  std::mt19937_64 rng(3);
  const Grid g = make_grid(8.0, 128);
  const Profile k = oracle::random_cone_profile(g, rng);
  std::vector<double> raw(g.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : raw) v = u(rng);
  const Profile w(g, raw);
  std::vector<double> shifted(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) shifted[(j + 1) % g.size()] = raw[j];
  const Profile a = convolve(k, w);
  const Profile b = convolve(k, Profile(g, shifted));
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(b[(j + 1) % g.size()], a[j], 1e-13);
}

TEST(Convolve, PreservesCone) {
  std::mt19937_64 rng(11);
  const Grid g = make_grid(10.0, 512);
  for (int trial = 0; trial < 20; ++trial) {
    const Profile k = oracle::random_cone_profile(g, rng);
    const Profile w = oracle::random_cone_profile(g, rng);
    ASSERT_TRUE(cone_check(k).in_cone(0.0));
    ASSERT_TRUE(cone_check(w).in_cone(0.0));
    const Profile r = convolve(k, w);
    EXPECT_TRUE(cone_check(r).in_cone(1e-10 * sup_norm(r)));
  }
}

TEST(Convolve, SelfAdjointForEvenKernels) {
  std::mt19937_64 rng(5);
  const Grid g = make_grid(10.0, 512);
  const Kernel b = gaussian_kernel(g, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> r1(g.size()), r2(g.size());
    for (auto& v : r1) v = u(rng);
    for (auto& v : r2) v = u(rng);
    const Profile w1(g, r1), w2(g, r2);
    const double lhs = inner_product(convolve(b.profile, w1), w2);
    const double rhs = inner_product(w1, convolve(b.profile, w2));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Parseval, DiscretePlancherel) {
  std::mt19937_64 rng(2);
  const Grid g = make_grid(5.0, 200);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> raw(g.size());
  for (auto& v : raw) v = u(rng);
  const Profile w(g, raw);
  const Spectrum s = forward_dft(w.values());
  double spectral = std::norm(s[0]) + std::norm(s[g.size() / 2]);
  for (std::size_t m = 1; m < g.size() / 2; ++m) spectral += 2.0 * std::norm(s[m]);
  spectral *= g.spacing() / static_cast<double>(g.size());
  EXPECT_NEAR(inner_product(w, w), spectral, 1e-12 * spectral);
}

TEST(ConeCheck, GaussianInCone) {
  const Grid g = make_grid(10.0, 200);
  const ConeReport r = cone_check(Profile::sample(g, [](double x) { return std::exp(-x * x); }));
  EXPECT_EQ(r.even_deviation, 0.0);
  EXPECT_EQ(r.unimodality_deviation, 0.0);
  EXPECT_GT(r.min_value, 0.0);
}

TEST(ConeCheck, OddFunctionFlagged) {
  const Grid g = make_grid(1.0, 16);
  const ConeReport r = cone_check(Profile::sample(g, [](double x) { return x; }));
  EXPECT_NEAR(r.even_deviation, 2.0 * 0.875, 1e-15);
  EXPECT_LT(r.min_value, 0.0);
  EXPECT_GT(r.negativity(), 0.0);
}

TEST(ConeCheck, CosineNotUnimodal) {
  const Grid g = make_grid(4.0, 64);
  const ConeReport r = cone_check(Profile::sample(g, [](double x) { return std::cos(2 * std::numbers::pi * x / 4.0); }));
  EXPECT_GT(r.unimodality_deviation, 0.0);
}

TEST(Symmetrize, EvenInputUnchangedAndIdempotent) {
  const Grid g = make_grid(3.0, 48);
  const Profile e = Profile::sample(g, [](double x) { return std::cosh(0.3 * x); });
  const Profile s = symmetrize(e);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (j != 0) EXPECT_EQ(s[j], e[j]);
  }
  const Profile ss = symmetrize(s);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(ss[j], s[j]);
}

TEST(Symmetrize, RemovesOddPart) {
  const Grid g = make_grid(3.0, 48);
  const Profile odd = symmetrize(Profile::sample(g, [](double x) { return x; }));
  // The wrap node x = -L has no partner inside the grid and keeps its value.
  for (std::size_t j = 1; j < g.size(); ++j) EXPECT_EQ(odd[j], 0.0);
  const Profile mixed = symmetrize(Profile::sample(g, [](double x) { return x + x * x; }));
  for (std::size_t j = 1; j < g.size(); ++j) EXPECT_NEAR(mixed[j], g.node(j) * g.node(j), 1e-14);
}
