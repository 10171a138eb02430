#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nleig/functionals.hpp"
#include "oracles.hpp"

using namespace nleig;

namespace {

const Grid& grid() {
  static const Grid g = make_grid(25.0, 2000);
  return g;
}

const Kernel& gauss() {
  static const Kernel b = gaussian_kernel(grid(), 1.0);
  return b;
}

Profile with_K(const Profile& v, double K) { return v.scaled(std::sqrt(2.0 * K) / l2_norm(v)); }

}  // namespace

TEST(EvalK, FullPeriodPlateau) {
  const double K = 1.7;
  const double L = grid().half_period();
  const Profile v = Profile::constant(grid(), std::sqrt(K / L));
  EXPECT_NEAR(eval_K(v), K, 1e-13);
}

TEST(EvalK, ZeroAndHomogeneity) {
  EXPECT_EQ(eval_K(Profile::zeros(grid())), 0.0);
  const Profile v = Profile::sample(grid(), [](double x) { return std::exp(-x * x / 8); });
  EXPECT_NEAR(eval_K(v.scaled(3.0)), 9.0 * eval_K(v), 1e-13 * eval_K(v));
}

TEST(EvalP, Zero) {
  EXPECT_EQ(eval_P(Profile::zeros(grid()), gauss(), exp_nonlinearity()), 0.0);
  EXPECT_EQ(eval_Q(Profile::zeros(grid()), gauss(), 1.0), 0.0);
}

TEST(EvalP, LinearizedEqualsQ) {
  const Profile v = with_K(Profile::sample(grid(), [](double x) { return std::exp(-x * x / 4); }), 1.0);
  const Nonlinearity lin = Nonlinearity::linear(2.5);
  EXPECT_NEAR(eval_P(v, gauss(), lin), eval_Q(v, gauss(), 2.5), 1e-10);
}

TEST(EvalP, ExpExceedsQuadratic) {
  const Profile v = with_K(gauss().profile, 1.0);
  const double p = eval_P(v, gauss(), exp_nonlinearity());
  const double q = eval_Q(v, gauss(), 1.0);
  EXPECT_GT(p, q);
  const Profile u = convolve(gauss(), v);
  double direct = 0.0;
  for (double r : u.values()) direct += std::exp(r) - r - 1.0;
  EXPECT_NEAR(p, grid().spacing() * direct, 1e-12 * p);
}

TEST(EvalP, DomainBreachForSingular) {
  const Profile v = Profile::constant(grid(), 1.2);
  try {
    eval_P(v, gauss(), singular_nonlinearity(4.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainBreach);
  }
}

TEST(EvalQ, ConstantProfile) {
  const Profile v = Profile::constant(grid(), 0.3);
  EXPECT_NEAR(eval_Q(v, gauss(), 2.0), 2.0 * eval_K(v), 1e-13);
}

TEST(EvalQ, YoungBound) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const Profile v = oracle::random_cone_profile(grid(), rng);
    EXPECT_LE(eval_Q(v, gauss(), 1.0), eval_K(v) * (1.0 + 1e-12));
  }
}

TEST(EvalQ, WidePlateauApproachesAlphaK) {
  const Grid g = make_grid(250.0, 10000);
  const Kernel b = gaussian_kernel(g, 1.0);
  const double ell = 100.0;
  const double K = 1.0;
  const Profile v = Profile::sample(g, [&](double x) { return std::abs(x) <= ell ? std::sqrt(K / ell) : 0.0; });
  const double ratio = eval_Q(v, b, 1.0) / eval_K(v);
  EXPECT_LT(ratio, 1.0);
  EXPECT_GT(ratio, 0.99);
}

TEST(GradP, ZeroAndLinearProbe) {
  EXPECT_EQ(sup_norm(grad_P(Profile::zeros(grid()), gauss(), exp_nonlinearity())), 0.0);
  const Profile v = Profile::sample(grid(), [](double x) { return std::exp(-std::abs(x)); });
  const Profile g = grad_P(v, gauss(), Nonlinearity::linear(3.0));
  const Profile two = convolve(gauss(), convolve(gauss(), v)).scaled(3.0);
  EXPECT_LE(l2_distance(g, two), 1e-14 * l2_norm(two));
}

TEST(GradP, MatchesDirectionalFiniteDifferences) {
  std::mt19937_64 rng(42);
  for (const Nonlinearity& nl : {exp_nonlinearity(), quadratic_nonlinearity(1.0, 2.0), singular_nonlinearity(4.0)}) {
    for (int i = 0; i < 10; ++i) {
      const double K = nl.family() == Nonlinearity::Family::Singular ? 0.5 : 1.0;
      const Profile v = with_K(oracle::random_cone_profile(grid(), rng), K);
      const Profile w = with_K(oracle::random_cone_profile(grid(), rng), 1.0);
      const double t = 1e-5;
      const double fd = (eval_P(v + w.scaled(t), gauss(), nl) - eval_P(v - w.scaled(t), gauss(), nl)) / (2 * t);
      const double exact = inner_product(grad_P(v, gauss(), nl), w);
      EXPECT_NEAR(fd, exact, 1e-6 * std::abs(exact)) << nl.name();
    }
  }
}

TEST(Convexity, SupportingHyperplane) {
  std::mt19937_64 rng(9);
  const Nonlinearity nl = exp_nonlinearity();
  for (int i = 0; i < 20; ++i) {
    const Profile v = with_K(oracle::random_cone_profile(grid(), rng), 1.0);
    const Profile w = with_K(oracle::random_cone_profile(grid(), rng), 2.0);
    const double lhs = eval_P(w, gauss(), nl) - eval_P(v, gauss(), nl);
    const double rhs = inner_product(grad_P(v, gauss(), nl), w - v);
    EXPECT_GE(lhs, rhs - 1e-9);
  }
}

// A wide plateau keeps Q close to alpha K while the cubic part of F lifts P above it.
TEST(SuperQuadratic, WitnessExistsForEachPair) {
  const Profile plateau = Profile::sample(grid(), [](double x) { return std::abs(x) <= 10.0 ? 1.0 : 0.0; });
  for (const Nonlinearity& nl : {exp_nonlinearity(), quadratic_nonlinearity(1.0, 2.0), singular_nonlinearity(4.0)}) {
    const double K = nl.family() == Nonlinearity::Family::Singular ? 0.8 * gauss().k_max_norm : 1.0;
    const Profile v = with_K(plateau, K);
    EXPECT_GT(eval_P(v, gauss(), nl), nl.alpha() * eval_K(v)) << nl.name();
  }
}

TEST(Energies, RecordConsistent) {
  const Profile v = with_K(gauss().profile, 1.0);
  const EnergyRecord e = energies(v, gauss(), exp_nonlinearity());
  EXPECT_NEAR(e.K, 1.0, 1e-13);
  EXPECT_GE(e.P, e.Q);
  EXPECT_GE(e.Q, 0.0);
  EXPECT_EQ(e.sup_U, convolve(gauss(), v).max());
}
