#include <cmath>

#include <gtest/gtest.h>

#include "softnash/controller.hpp"
#include "softnash/model.hpp"
#include "softnash/riccati.hpp"

using namespace softnash;

namespace {

MatrixXd m1(double v) { return MatrixXd::Constant(1, 1, v); }

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

TEST(SolveDare, ZeroDynamicsReturnsQ) {
  const auto sol = solve_dare(m1(0), m1(1), m1(2), m1(1));
  EXPECT_EQ(sol.P(0, 0), 2.0);
}

TEST(SolveDare, ScalarGoldenRatio) {
  const auto sol = solve_dare(m1(1), m1(1), m1(1), m1(1));
  EXPECT_NEAR(sol.P(0, 0), kPhi, 1e-12);
  EXPECT_LE(sol.residual, 1e-12 * kPhi);
}

TEST(SolveDare, LyapunovWhenUnactuated) {
  const auto sol = solve_dare(m1(0.5), m1(0), m1(1), m1(1));
  EXPECT_NEAR(sol.P(0, 0), 4.0 / 3.0, 1e-12);
}

TEST(SolveDare, RejectsNonPositiveDefiniteR) {
  EXPECT_THROW(solve_dare(m1(1), m1(1), m1(1), m1(0)), std::invalid_argument);
  EXPECT_THROW(solve_dare(m1(1), m1(1), m1(1), m1(-1)), std::invalid_argument);
}

TEST(SolveDare, RejectsShapeErrors) {
  EXPECT_THROW(solve_dare(MatrixXd::Identity(2, 2), m1(1), m1(1), m1(1)),
               std::invalid_argument);
  MatrixXd Q(2, 2);
  Q << 1, 0.5, 0, 1;
  EXPECT_THROW(solve_dare(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 1), Q, m1(1)),
               std::invalid_argument);
}

TEST(SolveDare, NonConvergenceCarriesResidual) {
  // A = 2 with no actuation has no stabilizing solution.
  try {
    RiccatiOptions opt;
    opt.max_iter = 50;
    solve_dare(m1(2), m1(0), m1(1), m1(1), opt);
    FAIL() << "expected RiccatiError";
  } catch (const RiccatiError& e) {
    EXPECT_EQ(e.iterations(), 50);
    EXPECT_GT(e.last_residual(), 1.0);
  }
}

class DefaultPlantDare : public ::testing::Test {
 protected:
  Dynamics dyn = discretize_mass_damper(0.2, 4.0, 0.01);
  MatrixXd Q = dyn.C.transpose() * (400.0 * MatrixXd::Identity(3, 3)) * dyn.C;
  MatrixXd R = MatrixXd::Identity(3, 3);
};

TEST_F(DefaultPlantDare, MatchesIndependentSolver) {
  const auto sol = solve_dare(dyn.A, dyn.B, Q, R);
  // Schur-based reference solution.
  EXPECT_NEAR(sol.P(0, 0), 10037.43280707528, 1e-6);
  EXPECT_NEAR(sol.P(0, 3), 409.1885529215741, 1e-7);
  EXPECT_NEAR(sol.P(3, 3), 18.588179605156718, 1e-8);
}

TEST_F(DefaultPlantDare, Certificate) {
  const auto sol = solve_dare(dyn.A, dyn.B, Q, R);
  EXPECT_LE(dare_defect(dyn.A, dyn.B, Q, R, sol.P), 1e-9);
  EXPECT_LE((sol.P - sol.P.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sol.P);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST_F(DefaultPlantDare, ResidualsMonotoneAfterWarmup) {
  RiccatiOptions opt;
  opt.keep_residual_log = true;
  const auto sol = solve_dare(dyn.A, dyn.B, Q, R, opt);
  ASSERT_GT(sol.residual_log.size(), 10u);
  for (std::size_t i = 11; i < sol.residual_log.size(); ++i) {
    EXPECT_LE(sol.residual_log[i], sol.residual_log[i - 1]) << "sweep " << i;
  }
}

TEST_F(DefaultPlantDare, AxisBlocksIdentical) {
  const auto P = solve_dare(dyn.A, dyn.B, Q, R).P;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i % 3 != j % 3) EXPECT_EQ(P(i, j), 0.0) << i << "," << j;
    }
  }
  for (int a = 1; a < 3; ++a) {
    EXPECT_EQ(P(a, a), P(0, 0));
    EXPECT_EQ(P(a, a + 3), P(0, 3));
    EXPECT_EQ(P(a + 3, a + 3), P(3, 3));
  }
}

TEST(SpectralRadius, Examples) {
  EXPECT_EQ(spectral_radius(MatrixXd::Identity(2, 2)), 1.0);
  MatrixXd N(2, 2);
  N << 0, 1, 0, 0;
  EXPECT_EQ(spectral_radius(N), 0.0);
  EXPECT_EQ(spectral_radius(discretize_mass_damper(0.2, 4.0, 0.01).A), 1.0);
}

TEST(SpectralRadius, ComplexPair) {
  MatrixXd Rot(2, 2);
  Rot << 0.6, -0.8, 0.8, 0.6;
  EXPECT_NEAR(spectral_radius(0.5 * Rot), 0.5, 1e-15);
}

TEST(SpectralRadius, RejectsBadInput) {
  EXPECT_THROW(spectral_radius(MatrixXd::Zero(2, 3)), std::invalid_argument);
  MatrixXd M = MatrixXd::Identity(2, 2);
  M(0, 1) = std::nan("");
  EXPECT_THROW(spectral_radius(M), std::invalid_argument);
  M(0, 1) = INFINITY;
  EXPECT_THROW(spectral_radius(M), std::invalid_argument);
}
