#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace mvkpca;
using testutil::gaussian_matrix;

namespace {
MultiViewDataset one_view(const MatrixXd& x, KernelSpec k = LinearKernel{}, const std::string& name = "v") {
  MultiViewDataset d;
  d.views.push_back(View{ViewConfig{name, k, ViewRole::Input}, x});
  return d;
}

const MultiViewDataset& sine() { return testutil::sine_data().dataset; }
}  // namespace

TEST(PrimalEig, TwoSampleToy) {
  MatrixXd x(2, 1);
  x << 1, -1;
  const auto t = train_primal_eig(one_view(x), 1);
  EXPECT_NEAR(t.model.U_tilde(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(t.model.Gamma(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(t.model.U(0, 0), std::sqrt(2.0), 1e-14);
  EXPECT_EQ(t.report.algorithm, Algorithm::PrimalEig);
  EXPECT_EQ(t.report.gamma_offdiag_norm, 0.0);
}

TEST(PrimalEig, SineGammaDiagonalDecreasing) {
  const auto t = train_primal_eig(sine(), 4);
  const MatrixXd& g = t.model.Gamma;
  EXPECT_EQ(linalg::offdiag_norm(g), 0.0);
  for (Index i = 0; i < 4; ++i) EXPECT_GT(g(i, i), 0.0);
  for (Index i = 1; i < 4; ++i) EXPECT_GT(g(i - 1, i - 1), g(i, i));
}

TEST(PrimalEig, StationarityAgainstDualVariables) {
  const MultiViewDataset data = testutil::two_view_toy(20, 3, 2, 4);
  const auto t = train_primal_eig(data, 3);
  const auto features = centered_features(data);
  const MatrixXd h = primal_to_dual(t.model, features);
  for (std::size_t v = 0; v < features.size(); ++v) {
    EXPECT_LE((MatrixXd(t.model.U_block(v)) - features[v].values.transpose() * h).norm(), 1e-8);
  }
}

TEST(PrimalEig, ModelInvariants) {
  const auto t = train_primal_eig(testutil::two_view_toy(20, 3, 2, 5), 4);
  EXPECT_LE(linalg::orthonormality_error(t.model.U_tilde), 1e-8);
  EXPECT_LE((t.model.U - t.model.U_tilde * linalg::spd_sqrt(t.model.Gamma)).norm(), 1e-8);
}

TEST(PrimalEig, EigenResidual) {
  const auto t = train_primal_eig(sine(), 4);
  const CrossCovariance c = build_cross_covariance(centered_features(sine()));
  const MatrixXd r = c.values * t.model.U_tilde - t.model.U_tilde * t.model.Gamma;
  EXPECT_LE(r.norm(), 1e-8 * c.values.norm());
}

TEST(PrimalEig, GaussianHasNoExplicitMap) {
  EXPECT_THROW(train_primal_eig(one_view(gaussian_matrix(5, 2, 0), GaussianKernel{1.0}), 1), UnsupportedSetting);
  EXPECT_THROW(train_primal_stiefel(one_view(gaussian_matrix(5, 2, 0), GaussianKernel{1.0}), 1, {}, true),
               UnsupportedSetting);
}

TEST(PrimalEig, RankErrors) {
  EXPECT_THROW(train_primal_eig(sine(), 5), RankError);  // sine windows have rank 4
  EXPECT_THROW(train_primal_eig(one_view(gaussian_matrix(5, 2, 0)), 3), RankError);
  EXPECT_THROW(train_primal_eig(one_view(gaussian_matrix(3, 5, 0)), 3), RankError);
  EXPECT_THROW(train_primal_eig(one_view(gaussian_matrix(5, 2, 0)), 0), RankError);
}

TEST(DualEig, TwoSampleToy) {
  MatrixXd x(2, 1);
  x << 1, -1;
  const auto t = train_dual_eig(one_view(x), 1);
  EXPECT_NEAR(t.model.H(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t.model.H(1, 0), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t.model.Gamma(0, 0), 2.0, 1e-14);
}

TEST(DualEig, DuplicatedViewDoublesGamma) {
  const MatrixXd x = gaussian_matrix(10, 3, 3);
  const auto single = train_dual_eig(one_view(x), 2);
  MultiViewDataset both = one_view(x);
  both.views.push_back(View{ViewConfig{"w", LinearKernel{}, ViewRole::Input}, x});
  const auto doubled = train_dual_eig(both, 2);
  EXPECT_LE((doubled.model.Gamma - 2.0 * single.model.Gamma).norm(), 1e-10);
  EXPECT_LE((doubled.model.H - single.model.H).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DualEig, MatchesPrimalComponentsOnSine) {
  const auto p = train_primal_eig(sine(), 4);
  const auto d = train_dual_eig(sine(), 4);
  const MatrixXd hp = primal_to_dual(p.model, centered_features(sine()));
  EXPECT_LE(linalg::max_abs(linalg::sign_align(hp, d.model.H) - d.model.H), 1e-6);
}

TEST(DualEig, ModelInvariants) {
  const MultiViewDataset data = testutil::two_view_toy(25, 3, 2, 8);
  const auto t = train_dual_eig(data, 3);
  const MatrixXd k = summed_centered_gram(data).values;
  EXPECT_LE((t.model.H.transpose() * t.model.H - MatrixXd::Identity(3, 3)).norm(), 1e-8);
  EXPECT_LE((t.model.Gamma - t.model.H.transpose() * k * t.model.H).norm(), 1e-8 * k.norm());
  EXPECT_LE((k * t.model.H - t.model.H * t.model.Gamma).norm(), 1e-8 * k.norm());
  EXPECT_EQ(t.report.gamma_offdiag_norm, 0.0);
}

TEST(DualEig, GaussianKernelAllowed) {
  const auto t = train_dual_eig(one_view(gaussian_matrix(12, 2, 1), GaussianKernel{1.0}), 3);
  EXPECT_EQ(t.model.s, 3);
  EXPECT_FALSE(t.model.train_grams_uncentered[0].centered);
}

TEST(DualEig, SignConventionApplied) {
  const auto t = train_dual_eig(testutil::two_view_toy(15, 2, 2, 3), 3);
  for (Index j = 0; j < 3; ++j) {
    Index arg = 0;
    t.model.H.col(j).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(t.model.H(arg, j), 0.0);
  }
}

TEST(StiefelTraining, RotatedMatchesEigOnSine) {
  const auto pe = train_primal_eig(sine(), 4);
  const auto de = train_dual_eig(sine(), 4);
  const auto ps = train_primal_stiefel(sine(), 4, {}, true);
  const auto ds = train_dual_stiefel(sine(), 4, {}, true);
  const auto features = centered_features(sine());
  const MatrixXd h_ref = de.model.H;
  const MatrixXd h_ps = primal_to_dual(ps.model, features);
  EXPECT_LE(linalg::max_abs(linalg::sign_align(h_ps, h_ref) - h_ref), 1e-3);
  EXPECT_LE(linalg::max_abs(linalg::sign_align(ds.model.H, h_ref) - h_ref), 1e-3);
  EXPECT_LE(linalg::max_abs(linalg::sign_align(ps.model.U_tilde, pe.model.U_tilde) - pe.model.U_tilde), 1e-3);
  EXPECT_TRUE(ps.report.rotated);
  EXPECT_TRUE(ds.report.converged);
}

TEST(StiefelTraining, UnrotatedGammaIsDense) {
  const auto ps = train_primal_stiefel(sine(), 4, {}, false);
  const auto ds = train_dual_stiefel(sine(), 4, {}, false);
  EXPECT_GT(linalg::offdiag_norm(ps.model.Gamma), 1e-3);
  EXPECT_GT(linalg::offdiag_norm(ds.model.Gamma), 1e-3);
  EXPECT_DOUBLE_EQ(ps.report.gamma_offdiag_norm, linalg::offdiag_norm(ps.model.Gamma));
  EXPECT_LE((ps.model.U - ps.model.U_tilde * linalg::spd_sqrt(ps.model.Gamma)).norm(), 1e-8);
}

TEST(StiefelTraining, ObjectiveMatchesOracle) {
  const CrossCovariance c = build_cross_covariance(centered_features(sine()));
  const GramMatrix k = summed_centered_gram(sine());
  const auto lc = linalg::sym_eig_descending(c.values).values;
  const auto ps = train_primal_stiefel(sine(), 4, {}, false);
  const auto ds = train_dual_stiefel(sine(), 4, {}, false);
  EXPECT_NEAR(ps.report.final_objective, 0.5 * (c.values.trace() - lc.head(4).sum()), 1e-6);
  EXPECT_NEAR(ds.report.final_objective, 0.5 * (k.values.trace() - lc.head(4).sum()), 1e-6);
}

TEST(StiefelTraining, ExternalRotationEqualsRotateFlag) {
  const MultiViewDataset data = testutil::two_view_toy(30, 3, 2, 6);
  const auto raw = train_dual_stiefel(data, 3, {}, false);
  const auto rot = train_dual_stiefel(data, 3, {}, true);
  const Rotation ext = rotate_solution(raw.model.H, summed_centered_gram(data).values);
  EXPECT_LE((ext.A - rot.model.H).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((MatrixXd(ext.lambda.asDiagonal()) - rot.model.Gamma).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(StiefelTraining, RffDualMatchesEig) {
  ExperimentConfig cfg;
  cfg.dataset.kind = "logistic";
  cfg.n_train = 300;
  cfg.n_test = 0;
  cfg.lag.p = 10;
  cfg.input_kernel = RffKernel{1.0, 1000, 7};
  const MultiViewDataset data = prepare_data(cfg).dataset;
  const auto de = train_dual_eig(data, 3);
  const auto ds = train_dual_stiefel(data, 3, {}, true);
  EXPECT_LE(linalg::max_abs(linalg::sign_align(ds.model.H, de.model.H) - de.model.H), 1e-3);
  const GramMatrix k = summed_centered_gram(data);
  const double oracle = 0.5 * (k.values.trace() - de.model.Gamma.trace());
  EXPECT_NEAR(ds.report.final_objective, oracle, 1e-6 * k.values.trace());
}

TEST(Training, SpectrumIsAlgorithmInvariant) {
  const VectorXd ref = train_primal_eig(sine(), 4).model.Gamma.diagonal();
  const std::vector<MatrixXd> gammas{train_dual_eig(sine(), 4).model.Gamma,
                                     train_primal_stiefel(sine(), 4, {}, false).model.Gamma,
                                     train_dual_stiefel(sine(), 4, {}, false).model.Gamma};
  for (const auto& g : gammas) {
    const VectorXd l = linalg::sym_eig_descending(g).values;
    EXPECT_LE((l - ref).cwiseAbs().maxCoeff(), 1e-6 * ref(0));
  }
}

TEST(Training, ReconstructionErrorNonIncreasingInK) {
  const auto features = centered_features(sine());
  const MatrixXd phi = stack_features(features);
  const auto t = train_primal_eig(sine(), 4);
  double previous = phi.squaredNorm();
  for (Index k = 1; k <= 4; ++k) {
    const MatrixXd u = t.model.U_tilde.leftCols(k);
    const double err = (phi - phi * u * u.transpose()).squaredNorm();
    EXPECT_LE(err, previous * (1 + 1e-12));
    previous = err;
  }
}

TEST(SelectAlgorithm, FlowchartBranches) {
  EXPECT_EQ(select_algorithm(400, 0, false, false).algorithm, Algorithm::DualEig);
  const Recommendation big = select_algorithm(1000, 5001, true, false);
  EXPECT_EQ(big.algorithm, Algorithm::DualEig);
  EXPECT_NE(big.rationale.find("5.0x"), std::string::npos);
  EXPECT_EQ(select_algorithm(400, 81, true, false).algorithm, Algorithm::PrimalEig);
  EXPECT_EQ(select_algorithm(400, 400, true, false).algorithm, Algorithm::DualEig);
  EXPECT_THROW(select_algorithm(400, 81, true, true), UnsupportedSetting);
}

TEST(Algorithms, ParseSpellings) {
  EXPECT_EQ(parse_algorithm("PrimalEig"), Algorithm::PrimalEig);
  EXPECT_EQ(parse_algorithm("dual-stiefel"), Algorithm::DualStiefel);
  EXPECT_EQ(parse_algorithm("primal_stiefel"), Algorithm::PrimalStiefel);
  EXPECT_THROW(parse_algorithm("svd"), InvalidArgument);
  for (Algorithm a : {Algorithm::PrimalEig, Algorithm::DualEig, Algorithm::PrimalStiefel, Algorithm::DualStiefel}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
}
