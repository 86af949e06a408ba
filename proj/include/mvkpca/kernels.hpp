#pragma once

// Kernel functions, Gram matrices, centering, and random Fourier features.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include "mvkpca/errors.hpp"
#include "mvkpca/linalg.hpp"
#include "mvkpca/random.hpp"

namespace mvkpca {

/// k(x, y) = <x, y>; the feature map is the identity.
struct LinearKernel {
  friend bool operator==(const LinearKernel&, const LinearKernel&) = default;
};

/// k(x, y) = exp(-||x - y||^2 / (2 bandwidth^2)); no explicit feature map.
struct GaussianKernel {
  double bandwidth = 1.0;
  friend bool operator==(const GaussianKernel&, const GaussianKernel&) = default;
};

/// Random Fourier feature approximation of GaussianKernel with an explicit
/// `feature_dim`-dimensional map drawn from `seed`.
struct RffKernel {
  double bandwidth = 1.0;
  int feature_dim = 1;
  std::uint64_t seed = 0;
  friend bool operator==(const RffKernel&, const RffKernel&) = default;
};

using KernelSpec = std::variant<LinearKernel, GaussianKernel, RffKernel>;

inline void validate(const KernelSpec& spec) {
  if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
    if (!(g->bandwidth > 0.0)) throw InvalidArgument("Gaussian kernel bandwidth must be > 0");
  } else if (const auto* r = std::get_if<RffKernel>(&spec)) {
    if (!(r->bandwidth > 0.0)) throw InvalidArgument("RFF kernel bandwidth must be > 0");
    if (r->feature_dim < 1) throw InvalidArgument("RFF feature dimension must be >= 1");
  }
}

inline std::string kernel_name(const KernelSpec& spec) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, LinearKernel>) return "linear";
        else if constexpr (std::is_same_v<K, GaussianKernel>) return "gaussian";
        else return "rff";
      },
      spec);
}

/// True when the kernel comes with a finite-dimensional feature map, i.e. the
/// primal algorithms can be used.
inline bool has_explicit_map(const KernelSpec& spec) {
  return !std::holds_alternative<GaussianKernel>(spec);
}

/// Centered or raw explicit features, one sample per row.
struct FeatureMatrix {
  MatrixXd values;
  VectorXd column_means;  // means removed by center_features
  bool centered = false;
};

struct GramMatrix {
  MatrixXd values;
  bool centered = false;
};

// ---------------------------------------------------------------------------
// Random Fourier features

/// Frequencies and phases of an RFF map for inputs of dimension `input_dim`.
/// phi(x) = sqrt(2/D) cos(W^T x + b), W_{:,k} ~ N(0, bandwidth^{-2} I),
/// b_k ~ U[0, 2 pi).
struct RffMap {
  MatrixXd weights;  // input_dim x D
  VectorXd offsets;  // D

  static RffMap draw(const RffKernel& spec, Index input_dim) {
    validate(spec);
    DeterministicRng rng(spec.seed);
    RffMap map{MatrixXd(input_dim, spec.feature_dim), VectorXd(spec.feature_dim)};
    for (Index k = 0; k < spec.feature_dim; ++k) {
      for (Index i = 0; i < input_dim; ++i) map.weights(i, k) = rng.normal() / spec.bandwidth;
    }
    for (Index k = 0; k < spec.feature_dim; ++k) {
      map.offsets(k) = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return map;
  }

  MatrixXd apply(const MatrixXd& x) const {
    if (x.cols() != weights.rows()) {
      std::ostringstream msg;
      msg << "RFF map expects inputs of dimension " << weights.rows() << ", got " << x.cols();
      throw DimensionError(msg.str());
    }
    const double scale = std::sqrt(2.0 / static_cast<double>(weights.cols()));
    MatrixXd z = x * weights;
    z.rowwise() += offsets.transpose();
    return scale * z.array().cos().matrix();
  }
};

inline FeatureMatrix rff_features(const RffKernel& spec, const MatrixXd& x) {
  return FeatureMatrix{RffMap::draw(spec, x.cols()).apply(x), VectorXd::Zero(spec.feature_dim), false};
}

inline FeatureMatrix rff_features(const KernelSpec& spec, const MatrixXd& x) {
  const auto* rff = std::get_if<RffKernel>(&spec);
  if (rff == nullptr) throw UnsupportedSetting("rff_features requires an RFF kernel spec");
  return rff_features(*rff, x);
}

/// Explicit (uncentered) features for kernels that have them. Linear returns
/// the data itself.
inline FeatureMatrix explicit_features(const KernelSpec& spec, const MatrixXd& x) {
  validate(spec);
  if (std::holds_alternative<LinearKernel>(spec)) {
    return FeatureMatrix{x, VectorXd::Zero(x.cols()), false};
  }
  if (const auto* rff = std::get_if<RffKernel>(&spec)) return rff_features(*rff, x);
  throw UnsupportedSetting(
      "the Gaussian kernel has no explicit feature map; use a dual algorithm or approximate it "
      "with random Fourier features (see the algorithm-selection flowchart)");
}

// ---------------------------------------------------------------------------
// Kernel evaluation

namespace detail {
inline void check_same_length(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(msg.str());
  }
}
}  // namespace detail

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const VectorXd>& x,
                          const Eigen::Ref<const VectorXd>& y) {
  detail::check_same_length(x.size(), y.size(), "kernel_eval");
  validate(spec);
  if (std::holds_alternative<LinearKernel>(spec)) return x.dot(y);
  if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
    return std::exp(-(x - y).squaredNorm() / (2.0 * g->bandwidth * g->bandwidth));
  }
  const RffMap map = RffMap::draw(std::get<RffKernel>(spec), x.size());
  MatrixXd xy(2, x.size());
  xy.row(0) = x.transpose();
  xy.row(1) = y.transpose();
  const MatrixXd phi = map.apply(xy);
  return phi.row(0).dot(phi.row(1));
}

inline GramMatrix gram_matrix(const KernelSpec& spec, const MatrixXd& x) {
  validate(spec);
  if (x.rows() < 1) throw InvalidArgument("gram_matrix: need at least one sample");
  const Index n = x.rows();
  if (std::holds_alternative<GaussianKernel>(spec)) {
    const double sigma = std::get<GaussianKernel>(spec).bandwidth;
    const double denom = 2.0 * sigma * sigma;
    MatrixXd k(n, n);
    for (Index j = 0; j < n; ++j) {
      k(j, j) = 1.0;
      for (Index i = j + 1; i < n; ++i) {
        const double v = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / denom);
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    return GramMatrix{std::move(k), false};
  }
  const FeatureMatrix phi = explicit_features(spec, x);
  MatrixXd k = MatrixXd::Zero(n, n);
  k.selfadjointView<Eigen::Lower>().rankUpdate(phi.values);
  MatrixXd full = k.selfadjointView<Eigen::Lower>();
  return GramMatrix{std::move(full), false};
}

/// [k(x_1, x_new), ..., k(x_n, x_new)].
inline VectorXd cross_kernel_vector(const KernelSpec& spec, const MatrixXd& x_train,
                                    const Eigen::Ref<const VectorXd>& x_new) {
  detail::check_same_length(x_train.cols(), x_new.size(), "cross_kernel_vector");
  validate(spec);
  if (std::holds_alternative<LinearKernel>(spec)) return x_train * x_new;
  if (std::holds_alternative<GaussianKernel>(spec)) {
    VectorXd out(x_train.rows());
    for (Index j = 0; j < x_train.rows(); ++j) out(j) = kernel_eval(spec, x_train.row(j).transpose(), x_new);
    return out;
  }
  const RffMap map = RffMap::draw(std::get<RffKernel>(spec), x_train.cols());
  return map.apply(x_train) * map.apply(x_new.transpose()).transpose();
}

// ---------------------------------------------------------------------------
// Centering

/// M_c K M_c with M_c = I - 11^T/n. Idempotent, so already-centered input is
/// accepted.
inline GramMatrix center_gram(const GramMatrix& k) {
  const VectorXd col_means = k.values.colwise().mean().transpose();
  const VectorXd row_means = k.values.rowwise().mean();
  const double grand = k.values.mean();
  MatrixXd c = k.values;
  c.colwise() -= row_means;
  c.rowwise() -= col_means.transpose();
  c.array() += grand;
  return GramMatrix{linalg::symmetrize(c), true};
}

/// Out-of-sample centering: M_c (k_new - K 1 / n). Matches the columns of
/// center_gram(K) when x_new is a training point.
inline VectorXd center_test_kernel_vector(const GramMatrix& k_train_uncentered,
                                          const Eigen::Ref<const VectorXd>& k_new) {
  if (k_train_uncentered.centered) {
    throw InvalidArgument("center_test_kernel_vector needs the uncentered training Gram");
  }
  detail::check_same_length(k_train_uncentered.values.rows(), k_new.size(), "center_test_kernel_vector");
  VectorXd v = k_new - k_train_uncentered.values.rowwise().mean();
  v.array() -= v.mean();
  return v;
}

inline FeatureMatrix center_features(const FeatureMatrix& phi) {
  if (phi.centered) throw InvalidArgument("center_features: features are already centered");
  FeatureMatrix out;
  out.column_means = phi.values.colwise().mean().transpose();
  out.values = phi.values.rowwise() - out.column_means.transpose();
  out.centered = true;
  return out;
}

}  // namespace mvkpca
