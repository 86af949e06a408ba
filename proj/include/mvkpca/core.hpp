#pragma once

// Model types of the multi-view kernel PCA framework and the stationarity
// conversions between primal variables U and dual variables H.

#include <Eigen/Dense>

#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mvkpca/errors.hpp"
#include "mvkpca/kernels.hpp"
#include "mvkpca/linalg.hpp"

namespace mvkpca {

enum class ViewRole { Input, Target };

inline std::string_view to_string(ViewRole role) { return role == ViewRole::Input ? "input" : "target"; }

struct ViewConfig {
  std::string name;
  KernelSpec kernel = LinearKernel{};
  ViewRole role = ViewRole::Input;
};

inline void validate_view_configs(const std::vector<ViewConfig>& configs) {
  if (configs.empty()) throw InvalidArgument("a model needs at least one view");
  std::set<std::string> seen;
  for (const auto& c : configs) {
    if (!seen.insert(c.name).second) throw InvalidArgument("duplicate view name '" + c.name + "'");
    validate(c.kernel);
  }
}

inline std::size_t find_view(const std::vector<ViewConfig>& configs, std::string_view name) {
  for (std::size_t v = 0; v < configs.size(); ++v) {
    if (configs[v].name == name) return v;
  }
  throw InvalidArgument("unknown view '" + std::string(name) + "'");
}

/// One view: configuration plus its n x d_v data matrix.
struct View {
  ViewConfig config;
  MatrixXd data;
};

/// Views sharing a common sample index (row i of every view is sample i).
struct MultiViewDataset {
  std::vector<View> views;

  Index samples() const { return views.empty() ? 0 : views.front().data.rows(); }

  std::vector<ViewConfig> configs() const {
    std::vector<ViewConfig> out;
    out.reserve(views.size());
    for (const auto& v : views) out.push_back(v.config);
    return out;
  }

  void validate() const {
    validate_view_configs(configs());
    for (const auto& v : views) {
      if (v.data.rows() != samples()) {
        std::ostringstream msg;
        msg << "view '" << v.config.name << "' has " << v.data.rows() << " samples, expected "
            << samples();
        throw DimensionError(msg.str());
      }
    }
    if (samples() < 1) throw InvalidArgument("dataset has no samples");
  }

  bool all_explicit() const {
    for (const auto& v : views) {
      if (!has_explicit_map(v.config.kernel)) return false;
    }
    return true;
  }
};

/// C = Phi^T Phi of the stacked centered features; view v occupies rows and
/// columns [block_offsets[v], block_offsets[v+1]).
struct CrossCovariance {
  MatrixXd values;
  std::vector<Index> block_offsets;

  Index total_dim() const { return block_offsets.empty() ? 0 : block_offsets.back(); }
  auto block(std::size_t v, std::size_t w) const {
    return values.block(block_offsets[v], block_offsets[w], block_offsets[v + 1] - block_offsets[v],
                        block_offsets[w + 1] - block_offsets[w]);
  }
};

/// Primal solution. U = U_tilde Gamma^{1/2}, rows stacked per view.
struct PrimalModel {
  MatrixXd U;
  MatrixXd U_tilde;
  MatrixXd Gamma;
  std::vector<ViewConfig> view_configs;
  std::vector<VectorXd> feature_means;  // per view, removed before projection
  std::vector<Index> block_offsets;     // V + 1 entries
  Index s = 0;

  auto U_block(std::size_t v) const {
    return U.middleRows(block_offsets[v], block_offsets[v + 1] - block_offsets[v]);
  }
  auto U_tilde_block(std::size_t v) const {
    return U_tilde.middleRows(block_offsets[v], block_offsets[v + 1] - block_offsets[v]);
  }
};

/// Dual solution plus what out-of-sample kernel evaluation needs.
struct DualModel {
  MatrixXd H;
  MatrixXd Gamma;
  std::vector<ViewConfig> view_configs;
  std::vector<MatrixXd> train_data;
  std::vector<GramMatrix> train_grams_uncentered;
  Index s = 0;

  Index samples() const { return H.rows(); }
};

/// Score variables e_{v,i} of one sample in one view.
struct ScoreVector {
  VectorXd e;
};

// ---------------------------------------------------------------------------

/// Centered explicit features of every view. Throws UnsupportedSetting for
/// kernels without an explicit map.
inline std::vector<FeatureMatrix> centered_features(const MultiViewDataset& data) {
  data.validate();
  std::vector<FeatureMatrix> out;
  out.reserve(data.views.size());
  for (const auto& v : data.views) out.push_back(center_features(explicit_features(v.config.kernel, v.data)));
  return out;
}

inline std::vector<Index> block_offsets_of(const std::vector<FeatureMatrix>& features) {
  std::vector<Index> offsets{0};
  for (const auto& f : features) offsets.push_back(offsets.back() + f.values.cols());
  return offsets;
}

/// [Phi_1, ..., Phi_V], n x d_f.
inline MatrixXd stack_features(const std::vector<FeatureMatrix>& features) {
  if (features.empty()) throw InvalidArgument("no feature matrices");
  const Index n = features.front().values.rows();
  const auto offsets = block_offsets_of(features);
  MatrixXd phi(n, offsets.back());
  for (std::size_t v = 0; v < features.size(); ++v) {
    if (features[v].values.rows() != n) {
      std::ostringstream msg;
      msg << "feature matrix " << v << " has " << features[v].values.rows() << " rows, expected " << n;
      throw DimensionError(msg.str());
    }
    phi.middleCols(offsets[v], features[v].values.cols()) = features[v].values;
  }
  return phi;
}

inline CrossCovariance build_cross_covariance(const std::vector<FeatureMatrix>& features) {
  for (const auto& f : features) {
    if (!f.centered) throw InvalidArgument("build_cross_covariance expects centered features");
  }
  const MatrixXd phi = stack_features(features);
  MatrixXd c = MatrixXd::Zero(phi.cols(), phi.cols());
  c.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
  MatrixXd full = c.selfadjointView<Eigen::Lower>();
  return CrossCovariance{std::move(full), block_offsets_of(features)};
}

/// K = sum_v M_c K_v M_c.
inline GramMatrix summed_centered_gram(const MultiViewDataset& data) {
  data.validate();
  const Index n = data.samples();
  GramMatrix sum{MatrixXd::Zero(n, n), true};
  for (const auto& v : data.views) sum.values += center_gram(gram_matrix(v.config.kernel, v.data)).values;
  return sum;
}

/// J_pr = -1/2 Tr(U~^T C U~) + 1/2 Tr(C).
inline double primal_objective(const MatrixXd& u_tilde, const MatrixXd& c) {
  if (u_tilde.rows() != c.rows()) {
    std::ostringstream msg;
    msg << "primal_objective: U~ has " << u_tilde.rows() << " rows, C is " << c.rows() << "x" << c.cols();
    throw DimensionError(msg.str());
  }
  return -0.5 * (u_tilde.transpose() * c * u_tilde).trace() + 0.5 * c.trace();
}

inline double primal_objective(const MatrixXd& u_tilde, const CrossCovariance& c) {
  return primal_objective(u_tilde, c.values);
}

/// J_d = -1/2 Tr(H^T K H) + 1/2 Tr(K), K the summed centered Gram.
inline double dual_objective(const MatrixXd& h, const MatrixXd& k) {
  if (h.rows() != k.rows()) {
    std::ostringstream msg;
    msg << "dual_objective: H has " << h.rows() << " rows, K is " << k.rows() << "x" << k.cols();
    throw DimensionError(msg.str());
  }
  return -0.5 * (h.transpose() * k * h).trace() + 0.5 * k.trace();
}

inline double dual_objective(const MatrixXd& h, const GramMatrix& k) { return dual_objective(h, k.values); }

/// U_v = Phi_v^T H for every view, U~ = U Gamma^{-1/2}.
inline PrimalModel dual_to_primal(const MatrixXd& h, const std::vector<FeatureMatrix>& features,
                                  const MatrixXd& gamma, std::vector<ViewConfig> view_configs = {}) {
  const MatrixXd phi = stack_features(features);
  if (h.rows() != phi.rows()) {
    std::ostringstream msg;
    msg << "dual_to_primal: H has " << h.rows() << " rows, features have " << phi.rows();
    throw DimensionError(msg.str());
  }
  if (gamma.rows() != h.cols() || gamma.cols() != h.cols()) throw DimensionError("dual_to_primal: Gamma must be s x s");
  PrimalModel model;
  model.U = phi.transpose() * h;
  model.U_tilde = model.U * linalg::spd_inv_sqrt(gamma);
  model.Gamma = gamma;
  model.view_configs = std::move(view_configs);
  for (const auto& f : features) model.feature_means.push_back(f.column_means);
  model.block_offsets = block_offsets_of(features);
  model.s = h.cols();
  return model;
}

/// h_i = Gamma^{-1} sum_v U_v^T phi_v(x_i), returned as the n x s matrix H.
inline MatrixXd primal_to_dual(const PrimalModel& model, const std::vector<FeatureMatrix>& features) {
  const MatrixXd phi = stack_features(features);
  if (phi.cols() != model.U.rows()) {
    std::ostringstream msg;
    msg << "primal_to_dual: features have total dimension " << phi.cols() << ", model expects "
        << model.U.rows();
    throw DimensionError(msg.str());
  }
  return phi * model.U * linalg::spd_inverse(model.Gamma);
}

/// (V/2) e^T Gamma^{-1} e + 1/(2V) h^T Gamma h - e^T h, nonnegative for SPD
/// Gamma.
inline double fenchel_young_gap(const ScoreVector& score, const Eigen::Ref<const VectorXd>& h,
                                const MatrixXd& gamma, int views) {
  if (views < 1) throw InvalidArgument("fenchel_young_gap: need at least one view");
  const VectorXd& e = score.e;
  if (e.size() != h.size() || gamma.rows() != e.size() || gamma.cols() != e.size()) {
    throw DimensionError("fenchel_young_gap: e, h and Gamma must share dimension s");
  }
  const double v = static_cast<double>(views);
  const VectorXd gamma_inv_e = linalg::spd_inverse(gamma) * e;
  return 0.5 * v * e.dot(gamma_inv_e) + 0.5 / v * h.dot(gamma * h) - e.dot(h);
}

/// Per-sample, per-view residual ||phi_v(x_i) - U_v h_i|| of the feature
/// stationarity condition (n x V).
inline MatrixXd stationarity_residuals(const PrimalModel& model, const std::vector<FeatureMatrix>& features,
                                       const MatrixXd& h) {
  const Index n = h.rows();
  MatrixXd out(n, static_cast<Index>(features.size()));
  for (std::size_t v = 0; v < features.size(); ++v) {
    const MatrixXd recon = h * model.U_block(v).transpose();
    out.col(static_cast<Index>(v)) = (features[v].values - recon).rowwise().norm();
  }
  return out;
}

}  // namespace mvkpca
