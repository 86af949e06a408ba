#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace mvkpca;
using testutil::gaussian_matrix;

namespace {
double oracle(const MatrixXd& b, Index s) {
  return 0.5 * (b.trace() - linalg::sym_eig_descending(b).values.head(s).sum());
}
}  // namespace

TEST(Stiefel, DominantEigenvector) {
  const MatrixXd b = VectorXd::LinSpaced(3, 3, 1).asDiagonal();
  const StiefelResult r = stiefel_minimize(b, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.objective, 1.5, 1e-9);
  EXPECT_NEAR(std::abs(r.A(0, 0)), 1.0, 1e-6);
}

TEST(Stiefel, IsotropicStopsImmediately) {
  const StiefelResult r = stiefel_minimize(MatrixXd::Identity(5, 5), 2);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_NEAR(r.objective, 1.5, 1e-12);
}

TEST(Stiefel, MatchesEigenOracle) {
  const MatrixXd b = testutil::random_spd(8, 31);
  const StiefelResult r = stiefel_minimize(b, 3);
  EXPECT_NEAR(r.objective, oracle(b, 3), 1e-6);
  EXPECT_LE(linalg::orthonormality_error(r.A), 1e-8);
}

TEST(Stiefel, ObjectiveReportedMatchesDefinition) {
  const MatrixXd b = testutil::random_spd(6, 2);
  const StiefelResult r = stiefel_minimize(b, 2);
  EXPECT_NEAR(r.objective, primal_objective(r.A, b), 1e-12 * b.norm());
}

TEST(Stiefel, BestIterateOnIterationCap) {
  const MatrixXd b = testutil::random_spd(10, 5);
  StiefelOptions opts;
  opts.max_iters = 3;
  const StiefelResult r = stiefel_minimize(b, 2, opts);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(linalg::orthonormality_error(r.A), 1e-8);
  const MatrixXd a0 = stiefel_random_init(10, 2, opts.seed);
  EXPECT_LE(r.objective, primal_objective(a0, b) + 1e-12);
}

TEST(Stiefel, DeterministicGivenSeed) {
  const MatrixXd b = testutil::random_spd(7, 1);
  StiefelOptions opts;
  opts.seed = 42;
  const StiefelResult a = stiefel_minimize(b, 2, opts);
  const StiefelResult c = stiefel_minimize(b, 2, opts);
  EXPECT_EQ(a.A, c.A);
  EXPECT_EQ(a.iterations, c.iterations);
}

TEST(Stiefel, RejectsBadShapesAndOptions) {
  EXPECT_THROW(stiefel_minimize(MatrixXd::Identity(3, 3), 4), RankError);
  EXPECT_THROW(stiefel_minimize(MatrixXd::Identity(3, 3), 0), RankError);
  StiefelOptions opts;
  opts.learning_rate = 0.0;
  EXPECT_THROW(stiefel_minimize(MatrixXd::Identity(3, 3), 1, opts), InvalidArgument);
  opts = {};
  opts.adam_beta1 = 1.0;
  EXPECT_THROW(opts.validate(), InvalidArgument);
  EXPECT_THROW(stiefel_minimize_from(MatrixXd::Identity(3, 3), MatrixXd::Identity(4, 2), {}), DimensionError);
}

TEST(Stiefel, CayleyStepStaysOnManifold) {
  const MatrixXd a = stiefel_random_init(9, 3, 3);
  const MatrixXd g = gaussian_matrix(9, 3, 4);
  MatrixXd left(9, 6), right(9, 6);
  left << g, a;
  right << a, -g;
  const MatrixXd next = detail::cayley_step(a, left, right, 0.3);
  EXPECT_LE(linalg::orthonormality_error(next), 1e-12);
  // matches the dense (I + tau W)^{-1} (I - tau W) A
  const MatrixXd w = left * right.transpose();
  const MatrixXd eye = MatrixXd::Identity(9, 9);
  const MatrixXd dense = (eye + 0.3 * w).lu().solve((eye - 0.3 * w) * a);
  EXPECT_LE((next - dense).norm(), 1e-12);
}

TEST(Stiefel, RandomInitIsOrthonormal) {
  EXPECT_LE(linalg::orthonormality_error(stiefel_random_init(12, 4, 9)), 1e-12);
}

TEST(Rotation, EigenvectorInputGivesSignedPermutation) {
  const VectorXd lambda = (VectorXd(4) << 5, 3, 2, 1).finished();
  const MatrixXd b = testutil::psd_with_spectrum(lambda, 8);
  const auto ep = linalg::sym_eig_descending(b);
  MatrixXd a(4, 2);
  a << -ep.vectors.col(1), ep.vectors.col(0);
  const Rotation rot = rotate_solution(a, b);
  EXPECT_NEAR(rot.lambda(0), 5.0, 1e-12);
  EXPECT_NEAR(rot.lambda(1), 3.0, 1e-12);
  EXPECT_LE((rot.O.cwiseAbs() - (MatrixXd(2, 2) << 0, 1, 1, 0).finished()).norm(), 1e-12);
  EXPECT_LE((a * rot.O - rot.A).norm(), 1e-12);
}

TEST(Rotation, DiagonalisesGammaAndPreservesObjective) {
  const MatrixXd b = testutil::random_spd(10, 14);
  StiefelOptions opts;
  opts.seed = 3;
  const StiefelResult r = stiefel_minimize(b, 3, opts);
  const MatrixXd gp = r.A.transpose() * b * r.A;
  EXPECT_GT(linalg::offdiag_norm(gp), 1e-3);
  const Rotation rot = rotate_solution(r.A, b);
  const MatrixXd g = rot.A.transpose() * b * rot.A;
  EXPECT_LE(linalg::offdiag_norm(g), 1e-6 * g.trace());
  EXPECT_NEAR(primal_objective(rot.A, b), primal_objective(r.A, b), 1e-10);
  for (Index i = 1; i < rot.lambda.size(); ++i) EXPECT_GE(rot.lambda(i - 1), rot.lambda(i));
  EXPECT_LE((rot.O.transpose() * rot.O - MatrixXd::Identity(3, 3)).norm(), 1e-12);
}

TEST(Stiefel, OracleOnRandomSpectra) {
  DeterministicRng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Index m = 4 + static_cast<Index>(rng.uniform() * 9);
    const Index s = 1 + static_cast<Index>(rng.uniform() * 4);
    VectorXd lambda(m);
    for (Index i = 0; i < m; ++i) lambda(i) = 0.2 * static_cast<double>(m - i) + 0.05 * rng.uniform();
    const MatrixXd b = testutil::psd_with_spectrum(lambda, 100 + trial);
    StiefelOptions opts;
    opts.seed = static_cast<std::uint64_t>(trial);
    const StiefelResult r = stiefel_minimize(b, std::min(s, m), opts);
    EXPECT_NEAR(r.objective, oracle(b, std::min(s, m)), 1e-6) << "trial " << trial;
  }
}
