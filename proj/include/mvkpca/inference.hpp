#pragma once

// Missing-view inference from the stationarity conditions, in primal
// (feature) and dual (kernel-vector) form, plus pre-images for linear views.
//
// Everything here works in centered coordinates; only the pre-image
// operations add the training mean back.

#include <Eigen/Dense>

#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvkpca/core.hpp"
#include "mvkpca/errors.hpp"
#include "mvkpca/kernels.hpp"
#include "mvkpca/linalg.hpp"

namespace mvkpca {

struct InferenceRequest {
  std::map<std::string, VectorXd> known_views;  // name -> input-space vector
  std::string target_view;
};

/// Largest tolerated condition number of the inference system matrix.
inline constexpr double kMaxInferenceCondition = 1e12;

namespace detail {

/// Symmetric system M x = b solved through M's eigendecomposition, refusing
/// condition numbers above kMaxInferenceCondition. `scale` is the magnitude
/// of the terms M was formed from; an M that is rounding noise relative to it
/// counts as singular.
class GuardedSymmetricSolve {
 public:
  GuardedSymmetricSolve() = default;
  GuardedSymmetricSolve(const MatrixXd& m, const std::string& name, double scale = 0.0) {
    const linalg::EigenPairs ep = linalg::sym_eig_descending(m);
    const VectorXd mag = ep.values.cwiseAbs();
    const double hi = mag.maxCoeff();
    double lo = mag.minCoeff();
    if (hi <= 1e3 * std::numeric_limits<double>::epsilon() * scale) lo = 0.0;
    if (!(lo > 0.0) || hi / lo > kMaxInferenceCondition) {
      std::ostringstream msg;
      msg << "ill-conditioned inference: " << name << " has condition number "
          << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) << " (limit "
          << kMaxInferenceCondition << ")";
      throw IllConditioned(msg.str());
    }
    vectors_ = ep.vectors;
    inv_values_ = ep.values.cwiseInverse();
  }

  VectorXd solve(const VectorXd& b) const {
    return vectors_ * (inv_values_.asDiagonal() * (vectors_.transpose() * b));
  }

 private:
  MatrixXd vectors_;
  VectorXd inv_values_;
};

/// Index of the target view; checks that every other view is supplied and
/// nothing else is.
inline std::size_t check_request(const std::vector<ViewConfig>& configs, const InferenceRequest& req) {
  const std::size_t target = find_view(configs, req.target_view);
  if (req.known_views.count(req.target_view) != 0) {
    throw InvalidArgument("inference: target view '" + req.target_view + "' is also listed as known");
  }
  for (const auto& [name, x] : req.known_views) find_view(configs, name);
  for (std::size_t w = 0; w < configs.size(); ++w) {
    if (w != target && req.known_views.count(configs[w].name) == 0) {
      throw InvalidArgument("inference: view '" + configs[w].name +
                            "' is missing; only one view can be inferred at a time");
    }
  }
  return target;
}

}  // namespace detail

struct PrimalInferenceResult {
  VectorXd phi_hat;  // centered target-view feature estimate
  VectorXd h_hat;    // latent representation
};

/// Precomputed primal inference of one target view:
/// phi_v = U_v (Gamma - U_v^T U_v)^{-1} sum_{w != v} U_w^T phi_w.
class PrimalInference {
 public:
  PrimalInference(const PrimalModel& model, const std::string& target_view)
      : model_(&model), target_(find_view(model.view_configs, target_view)) {
    const MatrixXd u_v = model.U_block(target_);
    system_ = detail::GuardedSymmetricSolve(linalg::symmetrize(model.Gamma - u_v.transpose() * u_v),
                                            "(Gamma - U_v^T U_v) for view '" + target_view + "'",
                                            linalg::max_abs(model.Gamma));
    maps_.resize(model.view_configs.size());
  }

  /// Centered explicit feature of `x` in view `w`.
  VectorXd centered_feature(std::size_t w, const VectorXd& x) {
    const KernelSpec& spec = model_->view_configs[w].kernel;
    VectorXd phi;
    if (std::holds_alternative<LinearKernel>(spec)) {
      phi = x;
    } else if (const auto* rff = std::get_if<RffKernel>(&spec)) {
      if (!maps_[w]) maps_[w] = RffMap::draw(*rff, x.size());
      phi = maps_[w]->apply(x.transpose()).transpose();
    } else {
      throw UnsupportedSetting("primal inference: view '" + model_->view_configs[w].name +
                               "' has no explicit feature map");
    }
    if (phi.size() != model_->feature_means[w].size()) {
      std::ostringstream msg;
      msg << "primal inference: view '" << model_->view_configs[w].name << "' feature has dimension "
          << phi.size() << ", model expects " << model_->feature_means[w].size();
      throw DimensionError(msg.str());
    }
    return phi - model_->feature_means[w];
  }

  PrimalInferenceResult infer(const InferenceRequest& req) {
    if (detail::check_request(model_->view_configs, req) != target_) {
      throw InvalidArgument("inference plan was built for view '" + model_->view_configs[target_].name + "'");
    }
    VectorXd rhs = VectorXd::Zero(model_->s);
    for (std::size_t w = 0; w < model_->view_configs.size(); ++w) {
      if (w == target_) continue;
      rhs += model_->U_block(w).transpose() * centered_feature(w, req.known_views.at(model_->view_configs[w].name));
    }
    PrimalInferenceResult out;
    out.h_hat = system_.solve(rhs);
    out.phi_hat = model_->U_block(target_) * out.h_hat;
    return out;
  }

 private:
  const PrimalModel* model_;
  std::size_t target_;
  detail::GuardedSymmetricSolve system_;
  std::vector<std::optional<RffMap>> maps_;
};

inline PrimalInferenceResult infer_primal(const PrimalModel& model, const InferenceRequest& req) {
  return PrimalInference(model, req.target_view).infer(req);
}

struct DualInferenceResult {
  VectorXd k_hat;  // centered target-view kernel vector estimate
  VectorXd h_hat;
};

/// Precomputed dual inference of one target view:
/// k_v = K_v H (Gamma - H^T K_v H)^{-1} H^T sum_{w != v} k_w,
/// K_v the centered training Gram of the target view and k_w the centered
/// test kernel vectors of the known views.
class DualInference {
 public:
  DualInference(const DualModel& model, const std::string& target_view)
      : model_(&model), target_(find_view(model.view_configs, target_view)) {
    const MatrixXd k_v = center_gram(model.train_grams_uncentered[target_]).values;
    k_v_h_ = k_v * model.H;
    system_ = detail::GuardedSymmetricSolve(linalg::symmetrize(model.Gamma - model.H.transpose() * k_v_h_),
                                            "(Gamma - H^T K_v H) for view '" + target_view + "'",
                                            linalg::max_abs(model.Gamma));
    maps_.resize(model.view_configs.size());
    train_features_.resize(model.view_configs.size());
  }

  /// Centered out-of-sample kernel vector of `x` in view `w`.
  VectorXd centered_kernel_vector(std::size_t w, const VectorXd& x) {
    const KernelSpec& spec = model_->view_configs[w].kernel;
    const MatrixXd& train = model_->train_data[w];
    if (x.size() != train.cols()) {
      std::ostringstream msg;
      msg << "dual inference: view '" << model_->view_configs[w].name << "' input has dimension " << x.size()
          << ", training data has " << train.cols();
      throw DimensionError(msg.str());
    }
    VectorXd k;
    if (const auto* rff = std::get_if<RffKernel>(&spec)) {
      if (!maps_[w]) {
        maps_[w] = RffMap::draw(*rff, x.size());
        train_features_[w] = maps_[w]->apply(train);
      }
      k = *train_features_[w] * maps_[w]->apply(x.transpose()).transpose();
    } else {
      k = cross_kernel_vector(spec, train, x);
    }
    return center_test_kernel_vector(model_->train_grams_uncentered[w], k);
  }

  DualInferenceResult infer(const InferenceRequest& req) {
    if (detail::check_request(model_->view_configs, req) != target_) {
      throw InvalidArgument("inference plan was built for view '" + model_->view_configs[target_].name + "'");
    }
    VectorXd k_sum = VectorXd::Zero(model_->samples());
    for (std::size_t w = 0; w < model_->view_configs.size(); ++w) {
      if (w == target_) continue;
      k_sum += centered_kernel_vector(w, req.known_views.at(model_->view_configs[w].name));
    }
    DualInferenceResult out;
    out.h_hat = system_.solve(model_->H.transpose() * k_sum);
    out.k_hat = k_v_h_ * out.h_hat;
    return out;
  }

 private:
  const DualModel* model_;
  std::size_t target_;
  MatrixXd k_v_h_;
  detail::GuardedSymmetricSolve system_;
  std::vector<std::optional<RffMap>> maps_;
  std::vector<std::optional<MatrixXd>> train_features_;
};

inline DualInferenceResult infer_dual(const DualModel& model, const InferenceRequest& req) {
  return DualInference(model, req.target_view).infer(req);
}

// ---------------------------------------------------------------------------
// Pre-images

namespace detail {
inline void require_linear(const std::vector<ViewConfig>& configs, std::size_t v) {
  const KernelSpec& spec = configs[v].kernel;
  if (std::holds_alternative<LinearKernel>(spec)) return;
  if (std::holds_alternative<RffKernel>(spec)) {
    throw WrongKernel("view '" + configs[v].name +
                      "' uses random Fourier features; the cosine map has no closed-form inverse, so "
                      "no pre-image is available (use a linear kernel on target views)");
  }
  throw WrongKernel("view '" + configs[v].name + "' uses a " + kernel_name(spec) +
                    " kernel; pre-images are only available for linear kernels");
}
}  // namespace detail

/// Linear views: the feature map is the identity, so x = phi_hat + mean.
inline VectorXd preimage_linear(const PrimalModel& model, const std::string& view, const VectorXd& phi_hat) {
  const std::size_t v = find_view(model.view_configs, view);
  detail::require_linear(model.view_configs, v);
  if (phi_hat.size() != model.feature_means[v].size()) {
    throw DimensionError("preimage_linear: feature estimate has the wrong dimension");
  }
  return phi_hat + model.feature_means[v];
}

/// Pre-image of a centered linear kernel vector: k_hat = X_c x_c, solved as a
/// minimum-norm least-squares problem (singular values below 1e-10 sigma_max
/// dropped) and de-centered.
class LinearDualPreimage {
 public:
  LinearDualPreimage(const DualModel& model, const std::string& view) {
    const std::size_t v = find_view(model.view_configs, view);
    detail::require_linear(model.view_configs, v);
    const MatrixXd& x = model.train_data[v];
    mean_ = x.colwise().mean().transpose();
    const MatrixXd xc = x.rowwise() - mean_.transpose();
    Eigen::JacobiSVD<MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    VectorXd inv = VectorXd::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    }
    pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  }

  VectorXd operator()(const VectorXd& k_hat) const {
    if (k_hat.size() != pinv_.cols()) {
      std::ostringstream msg;
      msg << "preimage_dual_linear: kernel vector has length " << k_hat.size() << ", expected " << pinv_.cols();
      throw DimensionError(msg.str());
    }
    return pinv_ * k_hat + mean_;
  }

 private:
  MatrixXd pinv_;
  VectorXd mean_;
};

inline VectorXd preimage_dual_linear(const DualModel& model, const std::string& view, const VectorXd& k_hat) {
  return LinearDualPreimage(model, view)(k_hat);
}

}  // namespace mvkpca
