#pragma once

// Nonlinear autoregressive (NAR) datasets, recursive forecasting, series
// generators and loaders.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mvkpca/core.hpp"
#include "mvkpca/errors.hpp"
#include "mvkpca/inference.hpp"
#include "mvkpca/random.hpp"

namespace mvkpca {

using Series = std::vector<double>;

/// Lag order p; each input window holds p + 1 values.
struct LagSpec {
  int p = 1;

  Index window_len() const { return static_cast<Index>(p) + 1; }
  void validate() const {
    if (p < 1) throw InvalidArgument("lag p must be a positive integer");
  }
};

struct SeriesSplit {
  Series train;
  Series test;
  std::string name;
};

struct LagEmbedding {
  MatrixXd X;  // n x (p+1), newest value first
  VectorXd y;  // n, value following each window
};

/// Row r = [x_{r+p}, x_{r+p-1}, ..., x_r], y_r = x_{r+p+1}; n = T - p - 1.
inline LagEmbedding lag_embed(const Series& series, const LagSpec& spec) {
  spec.validate();
  const Index t = static_cast<Index>(series.size());
  const Index w = spec.window_len();
  if (t < w + 1) {
    std::ostringstream msg;
    msg << "lag_embed: series of length " << t << " is too short for p=" << spec.p << " (need at least "
        << w + 1 << ")";
    throw InvalidArgument(msg.str());
  }
  const Index n = t - w;
  LagEmbedding out{MatrixXd(n, w), VectorXd(n)};
  for (Index r = 0; r < n; ++r) {
    for (Index j = 0; j < w; ++j) out.X(r, j) = series[static_cast<std::size_t>(r + spec.p - j)];
    out.y(r) = series[static_cast<std::size_t>(r + w)];
  }
  return out;
}

/// Default view names of a forecasting model.
inline constexpr const char* kInputView = "x";
inline constexpr const char* kTargetView = "y";

/// Two-view dataset: lag windows (input) and next values (target).
inline MultiViewDataset nar_dataset(const LagEmbedding& emb, KernelSpec input_kernel = LinearKernel{},
                                    KernelSpec target_kernel = LinearKernel{}) {
  MultiViewDataset data;
  data.views.push_back(View{ViewConfig{kInputView, std::move(input_kernel), ViewRole::Input}, emb.X});
  data.views.push_back(View{ViewConfig{kTargetView, std::move(target_kernel), ViewRole::Target}, emb.y});
  return data;
}

/// Newest-first window ending at the last value of `series`.
inline VectorXd last_window(const Series& series, const LagSpec& spec) {
  spec.validate();
  const Index w = spec.window_len();
  if (static_cast<Index>(series.size()) < w) throw InvalidArgument("last_window: series shorter than the window");
  VectorXd out(w);
  for (Index j = 0; j < w; ++j) out(j) = series[series.size() - 1 - static_cast<std::size_t>(j)];
  return out;
}

namespace detail {

struct ForecastViews {
  std::string input;
  std::string target;
};

inline ForecastViews forecast_views(const std::vector<ViewConfig>& configs) {
  if (configs.size() != 2) {
    throw InvalidArgument("recursive_forecast needs a two-view model (lag window, next value)");
  }
  const ViewConfig* input = nullptr;
  const ViewConfig* target = nullptr;
  for (const auto& c : configs) (c.role == ViewRole::Target ? target : input) = &c;
  if (input == nullptr || target == nullptr) {
    throw InvalidArgument("recursive_forecast needs exactly one input view and one target view");
  }
  return {input->name, target->name};
}

/// One-step predictor: window -> scalar next value.
class PrimalStep {
 public:
  PrimalStep(const PrimalModel& model, const ForecastViews& views)
      : model_(&model), views_(views), plan_(model, views.target) {}
  double operator()(const VectorXd& window) {
    const auto r = plan_.infer(InferenceRequest{{{views_.input, window}}, views_.target});
    return scalar(preimage_linear(*model_, views_.target, r.phi_hat));
  }

 private:
  static double scalar(const VectorXd& v) {
    if (v.size() != 1) throw DimensionError("recursive_forecast: target view must be one-dimensional");
    return v(0);
  }
  const PrimalModel* model_;
  ForecastViews views_;
  PrimalInference plan_;
};

class DualStep {
 public:
  DualStep(const DualModel& model, const ForecastViews& views)
      : views_(views), plan_(model, views.target), preimage_(model, views.target) {}
  double operator()(const VectorXd& window) {
    const auto r = plan_.infer(InferenceRequest{{{views_.input, window}}, views_.target});
    const VectorXd x = preimage_(r.k_hat);
    if (x.size() != 1) throw DimensionError("recursive_forecast: target view must be one-dimensional");
    return x(0);
  }

 private:
  ForecastViews views_;
  DualInference plan_;
  LinearDualPreimage preimage_;
};

template <class Model>
struct StepFor;
template <>
struct StepFor<PrimalModel> {
  using type = PrimalStep;
};
template <>
struct StepFor<DualModel> {
  using type = DualStep;
};

}  // namespace detail

/// Predict, prepend the prediction to the window, drop the oldest value,
/// repeat `horizon` times.
template <class Model>
Series recursive_forecast(const Model& model, VectorXd window, int horizon) {
  if (horizon < 0) throw InvalidArgument("recursive_forecast: horizon must be >= 0");
  Series out;
  if (horizon == 0) return out;
  const auto views = detail::forecast_views(model.view_configs);
  typename detail::StepFor<Model>::type step(model, views);
  const Index w = window.size();
  out.reserve(static_cast<std::size_t>(horizon));
  for (int k = 0; k < horizon; ++k) {
    const double next = step(window);
    out.push_back(next);
    if (w > 1) window.tail(w - 1) = window.head(w - 1).eval();
    window(0) = next;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generators

/// x_l = sum_j a_j sin(2 pi f_j l / sample_rate), l = 0..T-1.
inline Series gen_sum_of_sines(Index t, const std::vector<double>& amplitudes = {1.0, 0.2},
                               const std::vector<double>& frequencies = {100.0, 2000.0},
                               double sample_rate = 1e4) {
  if (amplitudes.size() != frequencies.size()) {
    throw InvalidArgument("gen_sum_of_sines: amplitude and frequency lists differ in length");
  }
  if (t < 0) throw InvalidArgument("gen_sum_of_sines: T must be >= 0");
  if (!(sample_rate > 0.0)) throw InvalidArgument("gen_sum_of_sines: sample_rate must be > 0");
  Series out(static_cast<std::size_t>(t), 0.0);
  for (Index l = 0; l < t; ++l) {
    double x = 0.0;
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
      x += amplitudes[j] * std::sin(2.0 * std::numbers::pi * frequencies[j] * static_cast<double>(l) / sample_rate);
    }
    out[static_cast<std::size_t>(l)] = x;
  }
  return out;
}

/// Chaotic surrogate series: x <- r x (1 - x) after `burn_in` discarded steps.
/// x0 is drawn from (0.1, 0.9) with `seed`.
inline Series gen_logistic_map(Index t, double r = 3.9, std::uint64_t seed = 0, Index burn_in = 100) {
  if (t < 0 || burn_in < 0) throw InvalidArgument("gen_logistic_map: lengths must be >= 0");
  if (!(r > 0.0 && r <= 4.0)) throw InvalidArgument("gen_logistic_map: r must lie in (0, 4]");
  DeterministicRng rng(seed);
  double x = rng.uniform(0.1, 0.9);
  for (Index i = 0; i < burn_in; ++i) x = r * x * (1.0 - x);
  Series out(static_cast<std::size_t>(t));
  for (auto& v : out) {
    v = x;
    x = r * x * (1.0 - x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// I/O and metrics

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}
}  // namespace detail

/// One value per line. A non-numeric first line is taken as a header; blank
/// lines are skipped.
inline Series parse_series_csv(std::istream& in, const std::string& source = "<stream>") {
  Series out;
  std::string line;
  int line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string cell = detail::trim(line);
    if (cell.empty()) continue;
    double v = 0.0;
    if (detail::parse_double(cell, v)) {
      out.push_back(v);
    } else if (!first_content) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    first_content = false;
  }
  if (out.empty()) throw ParseError(source + ": empty input, no numeric values found");
  return out;
}

inline Series load_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series file '" + path + "'");
  return parse_series_csv(in, path);
}

inline double mse(const Series& pred, const Series& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionError("mse: length mismatch (" + std::to_string(pred.size()) + " vs " +
                         std::to_string(truth.size()) + ")");
  }
  if (pred.empty()) throw InvalidArgument("mse: sequences must be non-empty");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return acc / static_cast<double>(pred.size());
}

}  // namespace mvkpca
