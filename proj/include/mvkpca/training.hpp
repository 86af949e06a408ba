#pragma once

// The four training algorithms (primal/dual x eigendecomposition/Stiefel)
// and the advisory algorithm-selection helper.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <string>
#include <string_view>

#include "mvkpca/core.hpp"
#include "mvkpca/errors.hpp"
#include "mvkpca/kernels.hpp"
#include "mvkpca/linalg.hpp"
#include "mvkpca/stiefel.hpp"

namespace mvkpca {

enum class Algorithm { PrimalEig, DualEig, PrimalStiefel, DualStiefel };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::PrimalEig: return "PrimalEig";
    case Algorithm::DualEig: return "DualEig";
    case Algorithm::PrimalStiefel: return "PrimalStiefel";
    case Algorithm::DualStiefel: return "DualStiefel";
  }
  return "?";
}

/// Case-insensitive; accepts the enum spelling ("DualStiefel") and the
/// dashed spelling ("dual-stiefel").
inline Algorithm parse_algorithm(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "primaleig") return Algorithm::PrimalEig;
  if (key == "dualeig") return Algorithm::DualEig;
  if (key == "primalstiefel") return Algorithm::PrimalStiefel;
  if (key == "dualstiefel") return Algorithm::DualStiefel;
  throw InvalidArgument("unknown algorithm '" + std::string(text) +
                        "' (expected PrimalEig, DualEig, PrimalStiefel or DualStiefel)");
}

inline bool is_primal(Algorithm a) { return a == Algorithm::PrimalEig || a == Algorithm::PrimalStiefel; }
inline bool is_stiefel(Algorithm a) { return a == Algorithm::PrimalStiefel || a == Algorithm::DualStiefel; }

struct TrainReport {
  Algorithm algorithm = Algorithm::PrimalEig;
  int iterations = 0;
  double final_objective = 0.0;
  /// ||offdiag(Gamma')||_F before any rotation; exactly 0 for the eig paths.
  double gamma_offdiag_norm = 0.0;
  bool rotated = false;
  /// False when the Stiefel optimizer hit max_iters.
  bool converged = true;
};

struct PrimalTraining {
  PrimalModel model;
  TrainReport report;
};

struct DualTraining {
  DualModel model;
  TrainReport report;
};

/// Retained eigenvalues at or below this fraction of the largest are treated
/// as rank deficiency.
inline constexpr double kRankRatio = 1e-10;

namespace detail {

inline void check_component_count(Index s, Index limit, const char* what) {
  if (s < 1 || s > limit) {
    std::ostringstream msg;
    msg << what << ": component count s=" << s << " must lie in [1, " << limit << "]";
    throw RankError(msg.str());
  }
}

inline void check_retained_spectrum(const VectorXd& retained, double lambda_max, const char* what) {
  for (Index i = 0; i < retained.size(); ++i) {
    if (!(retained(i) > kRankRatio * lambda_max)) {
      std::ostringstream msg;
      msg << what << ": component " << (i + 1) << " has eigenvalue " << retained(i)
          << ", at or below " << kRankRatio << " * lambda_max = " << kRankRatio * lambda_max
          << "; the data has rank " << i << ", choose s <= " << i;
      throw RankError(msg.str());
    }
  }
}

inline void require_explicit(const MultiViewDataset& data, const char* what) {
  for (const auto& v : data.views) {
    if (!has_explicit_map(v.config.kernel)) {
      throw UnsupportedSetting(std::string(what) + ": view '" + v.config.name +
                               "' uses a kernel without an explicit feature map; per the "
                               "algorithm-selection flowchart only the dual algorithms apply "
                               "(or approximate the kernel with random Fourier features)");
    }
  }
}

struct PrimalSetup {
  std::vector<FeatureMatrix> features;
  CrossCovariance c;
};

inline PrimalSetup primal_setup(const MultiViewDataset& data, Index s, const char* what) {
  data.validate();
  require_explicit(data, what);
  PrimalSetup out;
  out.features = centered_features(data);
  out.c = build_cross_covariance(out.features);
  check_component_count(s, std::min(data.samples() - 1, out.c.total_dim()), what);
  return out;
}

struct DualSetup {
  std::vector<GramMatrix> grams;
  GramMatrix k;
};

inline DualSetup dual_setup(const MultiViewDataset& data, Index s, const char* what) {
  data.validate();
  check_component_count(s, data.samples() - 1, what);
  DualSetup out;
  const Index n = data.samples();
  out.k = GramMatrix{MatrixXd::Zero(n, n), true};
  for (const auto& v : data.views) {
    out.grams.push_back(gram_matrix(v.config.kernel, v.data));
    out.k.values += center_gram(out.grams.back()).values;
  }
  return out;
}

inline PrimalModel primal_from_orthonormal(MatrixXd u_tilde, MatrixXd gamma, const MultiViewDataset& data,
                                           const PrimalSetup& setup) {
  PrimalModel model;
  model.U = u_tilde * linalg::spd_sqrt(gamma);
  model.U_tilde = std::move(u_tilde);
  model.Gamma = std::move(gamma);
  model.view_configs = data.configs();
  for (const auto& f : setup.features) model.feature_means.push_back(f.column_means);
  model.block_offsets = setup.c.block_offsets;
  model.s = model.U.cols();
  return model;
}

inline DualModel dual_from_orthonormal(MatrixXd h, MatrixXd gamma, const MultiViewDataset& data,
                                       DualSetup& setup) {
  DualModel model;
  model.s = h.cols();
  model.H = std::move(h);
  model.Gamma = std::move(gamma);
  model.view_configs = data.configs();
  for (const auto& v : data.views) model.train_data.push_back(v.data);
  model.train_grams_uncentered = std::move(setup.grams);
  return model;
}

/// Rank check on a Stiefel solution: Gamma' must carry s nonzero eigenvalues.
inline void check_gamma_rank(const MatrixXd& gamma_prime, double lambda_max, const char* what) {
  const linalg::EigenPairs ep = linalg::sym_eig_descending(gamma_prime);
  check_retained_spectrum(ep.values, std::max(lambda_max, ep.values(0)), what);
}

}  // namespace detail

/// Eigendecomposition of the cross-covariance C: U~, Lambda <- eig(C),
/// U <- U~ Lambda^{1/2}, Gamma <- Lambda.
inline PrimalTraining train_primal_eig(const MultiViewDataset& data, Index s) {
  auto setup = detail::primal_setup(data, s, "train_primal_eig");
  const linalg::EigenPairs ep = linalg::sym_eig_descending(setup.c.values);
  const VectorXd lambda = ep.values.head(s);
  detail::check_retained_spectrum(lambda, ep.values(0), "train_primal_eig");
  MatrixXd u_tilde = ep.vectors.leftCols(s);
  linalg::apply_sign_convention(u_tilde);

  PrimalTraining out;
  out.report.algorithm = Algorithm::PrimalEig;
  out.report.final_objective = primal_objective(u_tilde, setup.c);
  out.model = detail::primal_from_orthonormal(std::move(u_tilde), MatrixXd(lambda.asDiagonal()), data, setup);
  return out;
}

/// Eigendecomposition of the summed centered Gram K: H, Lambda <- eig(K),
/// Gamma <- Lambda.
inline DualTraining train_dual_eig(const MultiViewDataset& data, Index s) {
  auto setup = detail::dual_setup(data, s, "train_dual_eig");
  const linalg::EigenPairs ep = linalg::sym_eig_descending(setup.k.values);
  const VectorXd lambda = ep.values.head(s);
  detail::check_retained_spectrum(lambda, ep.values(0), "train_dual_eig");
  MatrixXd h = ep.vectors.leftCols(s);
  linalg::apply_sign_convention(h);

  DualTraining out;
  out.report.algorithm = Algorithm::DualEig;
  out.report.final_objective = dual_objective(h, setup.k);
  out.model = detail::dual_from_orthonormal(std::move(h), MatrixXd(lambda.asDiagonal()), data, setup);
  return out;
}

/// Stiefel optimisation of the primal problem, optionally rotated onto the
/// eigenbasis of Gamma'. Without rotation U = U~' Gamma'^{1/2} with the
/// symmetric square root of the non-diagonal Gamma'.
inline PrimalTraining train_primal_stiefel(const MultiViewDataset& data, Index s, const StiefelOptions& opts,
                                           bool rotate) {
  auto setup = detail::primal_setup(data, s, "train_primal_stiefel");
  const StiefelResult sol = stiefel_minimize(setup.c.values, s, opts);
  const MatrixXd gamma_prime = linalg::symmetrize(sol.A.transpose() * setup.c.values * sol.A);
  detail::check_gamma_rank(gamma_prime, setup.c.values.diagonal().maxCoeff(), "train_primal_stiefel");

  PrimalTraining out;
  out.report.algorithm = Algorithm::PrimalStiefel;
  out.report.iterations = sol.iterations;
  out.report.converged = sol.converged;
  out.report.gamma_offdiag_norm = linalg::offdiag_norm(gamma_prime);
  out.report.rotated = rotate;
  if (rotate) {
    Rotation rot = rotate_solution(sol.A, setup.c.values);
    out.report.final_objective = primal_objective(rot.A, setup.c);
    out.model = detail::primal_from_orthonormal(std::move(rot.A), MatrixXd(rot.lambda.asDiagonal()), data, setup);
  } else {
    out.report.final_objective = primal_objective(sol.A, setup.c);
    out.model = detail::primal_from_orthonormal(sol.A, gamma_prime, data, setup);
  }
  return out;
}

/// Dual counterpart of train_primal_stiefel.
inline DualTraining train_dual_stiefel(const MultiViewDataset& data, Index s, const StiefelOptions& opts,
                                       bool rotate) {
  auto setup = detail::dual_setup(data, s, "train_dual_stiefel");
  const StiefelResult sol = stiefel_minimize(setup.k.values, s, opts);
  const MatrixXd gamma_prime = linalg::symmetrize(sol.A.transpose() * setup.k.values * sol.A);
  detail::check_gamma_rank(gamma_prime, setup.k.values.diagonal().maxCoeff(), "train_dual_stiefel");

  DualTraining out;
  out.report.algorithm = Algorithm::DualStiefel;
  out.report.iterations = sol.iterations;
  out.report.converged = sol.converged;
  out.report.gamma_offdiag_norm = linalg::offdiag_norm(gamma_prime);
  out.report.rotated = rotate;
  if (rotate) {
    Rotation rot = rotate_solution(sol.A, setup.k.values);
    out.report.final_objective = dual_objective(rot.A, setup.k);
    out.model = detail::dual_from_orthonormal(std::move(rot.A), MatrixXd(rot.lambda.asDiagonal()), data, setup);
  } else {
    out.report.final_objective = dual_objective(sol.A, setup.k);
    out.model = detail::dual_from_orthonormal(sol.A, gamma_prime, data, setup);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Algorithm selection

struct Recommendation {
  Algorithm algorithm = Algorithm::DualEig;
  std::string rationale;
};

/// Advisory choice following the selection flowchart. Non-parametric feature
/// maps always get an eigendecomposition (exact); primal when the total
/// feature dimension is strictly below the sample count, dual otherwise or
/// whenever some view lacks an explicit map.
inline Recommendation select_algorithm(Index n, Index d_f_total, bool explicit_maps_available, bool parametric) {
  if (parametric) {
    throw UnsupportedSetting(
        "parametric feature/pre-image maps are trained jointly with the Stiefel algorithms and an "
        "added reconstruction loss; that branch of the selection flowchart is not supported here");
  }
  if (n < 1) throw InvalidArgument("select_algorithm: n must be positive");
  std::ostringstream why;
  if (!explicit_maps_available) {
    why << "no explicit feature map: only the dual setting applies (kernel trick); "
           "feature maps are fixed, so eigendecomposition of K is exact";
    return {Algorithm::DualEig, why.str()};
  }
  if (d_f_total < 1) throw InvalidArgument("select_algorithm: d_f must be positive when maps are explicit");
  if (d_f_total < n) {
    why << "explicit maps with d_f = " << d_f_total << " < n = " << n
        << ": the d_f x d_f cross-covariance C is the smaller problem; "
           "fixed feature maps, so eigendecomposition is exact";
    return {Algorithm::PrimalEig, why.str()};
  }
  const double ratio = static_cast<double>(d_f_total) / static_cast<double>(n);
  why.setf(std::ios::fixed);
  why.precision(1);
  why << "explicit maps with d_f = " << d_f_total << " >= n = " << n
      << ": the n x n kernel matrix K is the smaller problem; a Stiefel solve would optimise H in St("
      << n << ", s) instead of U in St(" << d_f_total << ", s), about " << ratio
      << "x fewer parameters; fixed feature maps, so eigendecomposition is exact";
  return {Algorithm::DualEig, why.str()};
}

}  // namespace mvkpca
