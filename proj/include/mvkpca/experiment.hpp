#pragma once

// Experiment configuration and the command implementations behind the
// `mvkpca` tool: train, forecast, compare, gen-data, recommend.

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mvkpca/core.hpp"
#include "mvkpca/errors.hpp"
#include "mvkpca/forecasting.hpp"
#include "mvkpca/serialization.hpp"
#include "mvkpca/training.hpp"

namespace mvkpca {

/// Raised when an output file exists and overwriting was not requested.
class OverwriteRefused : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOverwrite = 3;

/// Exit code for an exception escaping a command.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const OverwriteRefused*>(&e) != nullptr) return kExitOverwrite;
  if (dynamic_cast<const ConfigError*>(&e) != nullptr || dynamic_cast<const UnsupportedSetting*>(&e) != nullptr ||
      dynamic_cast<const ParseError*>(&e) != nullptr || dynamic_cast<const InvalidArgument*>(&e) != nullptr) {
    return kExitConfig;
  }
  return kExitComputation;
}

// ---------------------------------------------------------------------------
// Configuration

inline constexpr int kConfigSchemaVersion = 1;

struct DatasetConfig {
  std::string kind = "sine";  // sine | csv | logistic
  std::string path;           // csv
  std::vector<double> amplitudes{1.0, 0.2};
  std::vector<double> frequencies{100.0, 2000.0};
  double sample_rate = 1e4;
  double logistic_r = 3.9;
  std::uint64_t logistic_seed = 0;
  Index burn_in = 100;
};

struct Tolerances {
  double eig = 1e-6;
  double stiefel = 1e-3;
  double spectrum = 1e-6;  // relative to the largest eigenvalue
};

/// Defaults: the sum-of-sines experiment (p = 40, s = 4, 400 training
/// windows, 100 forecast steps, linear kernels).
struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  DatasetConfig dataset;
  Index n_train = 400;  // lag windows used for training
  Index n_test = 100;   // held-out values following the training segment
  LagSpec lag{40};
  KernelSpec input_kernel = LinearKernel{};
  KernelSpec target_kernel = LinearKernel{};
  Index s = 4;
  Algorithm algorithm = Algorithm::PrimalEig;
  bool rotate = true;
  StiefelOptions stiefel;
  Tolerances tolerances;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  /// Values the series must contain: training segment plus held-out tail.
  Index series_length() const { return n_train + lag.window_len() + n_test; }

  void validate() const {
    auto bad = [](const std::string& m) { throw ConfigError("invalid config: " + m); };
    if (schema_version != kConfigSchemaVersion) bad("unsupported schema_version " + std::to_string(schema_version));
    if (dataset.kind != "sine" && dataset.kind != "csv" && dataset.kind != "logistic") {
      bad("dataset.kind must be 'sine', 'csv' or 'logistic'");
    }
    if (dataset.kind == "csv" && dataset.path.empty()) bad("dataset.path is required for csv datasets");
    if (dataset.amplitudes.size() != dataset.frequencies.size()) bad("dataset amplitudes and frequencies differ in length");
    if (!(dataset.sample_rate > 0.0)) bad("dataset.sample_rate must be > 0");
    if (!(dataset.logistic_r > 0.0 && dataset.logistic_r <= 4.0)) bad("dataset.r must lie in (0, 4]");
    if (dataset.burn_in < 0) bad("dataset.burn_in must be >= 0");
    if (lag.p < 1) bad("lag must be >= 1");
    if (n_train < 2) bad("split.train must be >= 2");
    if (n_test < 0) bad("split.test must be >= 0");
    if (s < 1 || s > n_train - 1) bad("components must lie in [1, split.train - 1]");
    try {
      validate(input_kernel);
      validate(target_kernel);
      stiefel.validate();
    } catch (const Error& e) {
      bad(e.what());
    }
    if (!std::holds_alternative<LinearKernel>(target_kernel)) {
      bad("the target view must use a linear kernel (forecasting needs an exact pre-image)");
    }
    if (!(tolerances.eig > 0.0 && tolerances.stiefel > 0.0 && tolerances.spectrum > 0.0)) {
      bad("tolerances must be positive");
    }
  }

 private:
  static void validate(const KernelSpec& k) { mvkpca::validate(k); }
};

namespace detail {

inline void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("invalid config: '" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (ok.count(k) == 0) throw ConfigError("invalid config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

template <class F>
auto config_field(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

inline std::vector<double> number_list(const Json& j, const std::string& path) {
  const VectorXd v = json_io::vector(j, path);
  return {v.data(), v.data() + v.size()};
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
  using namespace json_io;
  ExperimentConfig c;
  detail::check_keys(j, "", {"schema_version", "dataset", "split", "lag", "views", "components", "algorithm", "rotate",
                             "stiefel", "tolerances", "output_dir", "seed"});
  detail::config_field([&] {
    if (j.contains("schema_version")) c.schema_version = static_cast<int>(integer(j["schema_version"], "schema_version"));
    if (j.contains("dataset")) {
      const Json& d = j["dataset"];
      detail::check_keys(d, "dataset", {"kind", "path", "amplitudes", "frequencies", "sample_rate", "r", "seed", "burn_in"});
      if (d.contains("kind")) c.dataset.kind = string(d["kind"], "dataset.kind");
      if (d.contains("path")) c.dataset.path = string(d["path"], "dataset.path");
      if (d.contains("amplitudes")) c.dataset.amplitudes = detail::number_list(d["amplitudes"], "dataset.amplitudes");
      if (d.contains("frequencies")) c.dataset.frequencies = detail::number_list(d["frequencies"], "dataset.frequencies");
      if (d.contains("sample_rate")) c.dataset.sample_rate = number(d["sample_rate"], "dataset.sample_rate");
      if (d.contains("r")) c.dataset.logistic_r = number(d["r"], "dataset.r");
      if (d.contains("seed")) c.dataset.logistic_seed = unsigned_integer(d["seed"], "dataset.seed");
      if (d.contains("burn_in")) c.dataset.burn_in = integer(d["burn_in"], "dataset.burn_in");
    }
    if (j.contains("split")) {
      const Json& s = j["split"];
      detail::check_keys(s, "split", {"train", "test"});
      if (s.contains("train")) c.n_train = integer(s["train"], "split.train");
      if (s.contains("test")) c.n_test = integer(s["test"], "split.test");
    }
    if (j.contains("lag")) c.lag.p = static_cast<int>(integer(j["lag"], "lag"));
    if (j.contains("views")) {
      const Json& v = j["views"];
      detail::check_keys(v, "views", {"input", "target"});
      if (v.contains("input")) c.input_kernel = kernel(v["input"], "views.input");
      if (v.contains("target")) c.target_kernel = kernel(v["target"], "views.target");
    }
    if (j.contains("components")) c.s = integer(j["components"], "components");
    if (j.contains("algorithm")) {
      const std::string name = string(j["algorithm"], "algorithm");
      try {
        c.algorithm = parse_algorithm(name);
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
      }
    }
    if (j.contains("rotate")) c.rotate = boolean(j["rotate"], "rotate");
    if (j.contains("stiefel")) {
      const Json& s = j["stiefel"];
      detail::check_keys(s, "stiefel", {"max_iters", "learning_rate", "adam_beta1", "adam_beta2", "grad_tol", "obj_tol",
                                        "stall_window"});
      if (s.contains("max_iters")) c.stiefel.max_iters = static_cast<int>(integer(s["max_iters"], "stiefel.max_iters"));
      if (s.contains("learning_rate")) c.stiefel.learning_rate = number(s["learning_rate"], "stiefel.learning_rate");
      if (s.contains("adam_beta1")) c.stiefel.adam_beta1 = number(s["adam_beta1"], "stiefel.adam_beta1");
      if (s.contains("adam_beta2")) c.stiefel.adam_beta2 = number(s["adam_beta2"], "stiefel.adam_beta2");
      if (s.contains("grad_tol")) c.stiefel.grad_tol = number(s["grad_tol"], "stiefel.grad_tol");
      if (s.contains("obj_tol")) c.stiefel.obj_tol = number(s["obj_tol"], "stiefel.obj_tol");
      if (s.contains("stall_window")) {
        c.stiefel.stall_window = static_cast<int>(integer(s["stall_window"], "stiefel.stall_window"));
      }
    }
    if (j.contains("tolerances")) {
      const Json& t = j["tolerances"];
      detail::check_keys(t, "tolerances", {"eig", "stiefel", "spectrum"});
      if (t.contains("eig")) c.tolerances.eig = number(t["eig"], "tolerances.eig");
      if (t.contains("stiefel")) c.tolerances.stiefel = number(t["stiefel"], "tolerances.stiefel");
      if (t.contains("spectrum")) c.tolerances.spectrum = number(t["spectrum"], "tolerances.spectrum");
    }
    if (j.contains("output_dir")) c.output_dir = string(j["output_dir"], "output_dir");
    if (j.contains("seed")) c.seed = unsigned_integer(j["seed"], "seed");
    return 0;
  });
  c.stiefel.seed = c.seed;
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

inline Json config_to_json(const ExperimentConfig& c) {
  Json d{{"kind", c.dataset.kind}};
  if (c.dataset.kind == "csv") d["path"] = c.dataset.path;
  if (c.dataset.kind == "sine") {
    d["amplitudes"] = c.dataset.amplitudes;
    d["frequencies"] = c.dataset.frequencies;
    d["sample_rate"] = c.dataset.sample_rate;
  }
  if (c.dataset.kind == "logistic") {
    d["r"] = c.dataset.logistic_r;
    d["seed"] = c.dataset.logistic_seed;
    d["burn_in"] = c.dataset.burn_in;
  }
  return {{"schema_version", c.schema_version},
          {"dataset", d},
          {"split", {{"train", c.n_train}, {"test", c.n_test}}},
          {"lag", c.lag.p},
          {"views", {{"input", json_io::kernel(c.input_kernel)}, {"target", json_io::kernel(c.target_kernel)}}},
          {"components", c.s},
          {"algorithm", std::string(to_string(c.algorithm))},
          {"rotate", c.rotate},
          {"stiefel",
           {{"max_iters", c.stiefel.max_iters},
            {"learning_rate", c.stiefel.learning_rate},
            {"adam_beta1", c.stiefel.adam_beta1},
            {"adam_beta2", c.stiefel.adam_beta2},
            {"grad_tol", c.stiefel.grad_tol},
            {"obj_tol", c.stiefel.obj_tol},
            {"stall_window", c.stiefel.stall_window}}},
          {"tolerances", {{"eig", c.tolerances.eig}, {"stiefel", c.tolerances.stiefel}, {"spectrum", c.tolerances.spectrum}}},
          {"output_dir", c.output_dir},
          {"seed", c.seed}};
}

// ---------------------------------------------------------------------------
// Data and training

struct ExperimentData {
  SeriesSplit split;     // train: the training segment, test: held-out values
  LagEmbedding embedding;
  MultiViewDataset dataset;
  VectorXd window;       // last training window, seeds the forecast
};

inline Series experiment_series(const ExperimentConfig& c) {
  const Index t = c.series_length();
  if (c.dataset.kind == "sine") {
    return gen_sum_of_sines(t, c.dataset.amplitudes, c.dataset.frequencies, c.dataset.sample_rate);
  }
  if (c.dataset.kind == "logistic") {
    return gen_logistic_map(t, c.dataset.logistic_r, c.dataset.logistic_seed, c.dataset.burn_in);
  }
  Series s = load_series_csv(c.dataset.path);
  if (static_cast<Index>(s.size()) < t) {
    throw ConfigError("invalid config: '" + c.dataset.path + "' holds " + std::to_string(s.size()) +
                      " values, the split needs " + std::to_string(t));
  }
  s.resize(static_cast<std::size_t>(t));
  return s;
}

inline ExperimentData prepare_data(const ExperimentConfig& c) {
  c.validate();
  const Series series = experiment_series(c);
  const auto cut = static_cast<std::ptrdiff_t>(c.n_train + c.lag.window_len());
  ExperimentData out;
  out.split.name = c.dataset.kind;
  out.split.train.assign(series.begin(), series.begin() + cut);
  out.split.test.assign(series.begin() + cut, series.end());
  out.embedding = lag_embed(out.split.train, c.lag);
  out.dataset = nar_dataset(out.embedding, c.input_kernel, c.target_kernel);
  out.window = last_window(out.split.train, c.lag);
  return out;
}

struct TrainedModel {
  SavedModel saved;
  TrainReport report;
  MatrixXd components;  // n x s latent representation H of the training samples
};

inline TrainedModel train_algorithm(const MultiViewDataset& data, Index s, Algorithm algorithm,
                                    const StiefelOptions& opts, bool rotate) {
  TrainedModel out;
  if (is_primal(algorithm)) {
    PrimalTraining t = algorithm == Algorithm::PrimalEig ? train_primal_eig(data, s)
                                                         : train_primal_stiefel(data, s, opts, rotate);
    out.components = primal_to_dual(t.model, centered_features(data));
    out.report = t.report;
    out.saved.model = std::move(t.model);
  } else {
    DualTraining t = algorithm == Algorithm::DualEig ? train_dual_eig(data, s)
                                                     : train_dual_stiefel(data, s, opts, rotate);
    out.components = t.model.H;
    out.report = t.report;
    out.saved.model = std::move(t.model);
  }
  return out;
}

inline Series forecast_with(const SavedModel& saved, const VectorXd& window, int horizon) {
  return std::visit([&](const auto& m) { return recursive_forecast(m, window, horizon); }, saved.model);
}

inline VectorXd gamma_spectrum(const SavedModel& saved) {
  const MatrixXd& g = std::visit([](const auto& m) -> const MatrixXd& { return m.Gamma; }, saved.model);
  return linalg::sym_eig_descending(g).values;
}

// ---------------------------------------------------------------------------
// File output

namespace detail {
inline std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}
}  // namespace detail

/// Writes `content` to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content, bool force = true) {
  namespace fs = std::filesystem;
  if (!force && fs::exists(path)) {
    throw OverwriteRefused("refusing to overwrite existing file '" + path.string() + "' (use --force)");
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

inline std::string components_csv(const MatrixXd& h) {
  std::ostringstream out;
  out << "sample_index";
  for (Index j = 0; j < h.cols(); ++j) out << ",h_" << (j + 1);
  out << "\n";
  for (Index i = 0; i < h.rows(); ++i) {
    out << i;
    for (Index j = 0; j < h.cols(); ++j) out << "," << detail::format_number(h(i, j));
    out << "\n";
  }
  return out.str();
}

/// step,predicted[,truth] rows; "# mse=" footer when truth is present.
inline std::string forecast_csv(const Series& pred, const std::optional<Series>& truth) {
  std::ostringstream out;
  out << "step,predicted" << (truth ? ",truth" : "") << "\n";
  for (std::size_t k = 0; k < pred.size(); ++k) {
    out << (k + 1) << "," << detail::format_number(pred[k]);
    if (truth) out << "," << detail::format_number((*truth)[k]);
    out << "\n";
  }
  if (truth && !pred.empty()) out << "# mse=" << detail::format_number(mse(pred, *truth)) << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Commands

struct TrainOutputs {
  std::filesystem::path model, report, components;
};

/// Trains `config.algorithm` and writes model.json, report.json and
/// components.csv into `out_dir`.
inline TrainOutputs cmd_train(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  const ExperimentData data = prepare_data(config);
  TrainedModel t = train_algorithm(data.dataset, config.s, config.algorithm, config.stiefel, config.rotate);
  t.saved.forecast = ForecastContext{config.lag.p, data.window, data.split.test};
  TrainOutputs out{out_dir / "model.json", out_dir / "report.json", out_dir / "components.csv"};
  write_file_atomic(out.model, dump_model(t.saved));
  write_file_atomic(out.report, report_to_json(t.report).dump(2) + "\n");
  write_file_atomic(out.components, components_csv(t.components));
  return out;
}

struct ForecastRequest {
  std::filesystem::path model_path;
  std::optional<int> horizon;               // default: length of the stored truth
  std::optional<std::string> window_path;   // newest-first values, one per line
  std::optional<std::string> truth_path;
};

inline std::string read_text(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Returns the forecast CSV text.
inline std::string cmd_forecast(const ForecastRequest& req) {
  const SavedModel saved = parse_model(read_text(req.model_path, "model file"));
  detail::forecast_views(saved.view_configs());

  VectorXd window;
  if (req.window_path) {
    const Series w = load_series_csv(*req.window_path);
    window = Eigen::Map<const VectorXd>(w.data(), static_cast<Index>(w.size()));
  } else if (saved.forecast) {
    window = saved.forecast->window;
  } else {
    throw InvalidArgument("the model has no stored forecast window; pass --window");
  }

  std::optional<Series> truth;
  if (req.truth_path) truth = load_series_csv(*req.truth_path);
  else if (saved.forecast && !saved.forecast->truth.empty()) truth = saved.forecast->truth;

  int horizon = 0;
  if (req.horizon) horizon = *req.horizon;
  else if (truth) horizon = static_cast<int>(truth->size());
  else throw InvalidArgument("no truth series available; pass --horizon");
  if (horizon < 0) throw InvalidArgument("--horizon must be >= 0");

  if (truth && static_cast<int>(truth->size()) < horizon) truth.reset();
  if (truth) truth->resize(static_cast<std::size_t>(horizon));
  const Series pred = forecast_with(saved, window, horizon);
  return forecast_csv(pred, truth);
}

struct PairResult {
  Algorithm a, b;
  double component_diff = 0.0;
  double forecast_diff = 0.0;
  double spectrum_diff = 0.0;  // relative
  double tolerance = 0.0;
  bool pass = false;
};

struct EquivalenceReport {
  struct Entry {
    Algorithm algorithm;
    TrainReport report;
    VectorXd spectrum;
  };
  std::vector<Entry> trained;
  std::vector<std::pair<Algorithm, std::string>> skipped;
  std::vector<PairResult> pairs;
  double spectrum_tolerance = 0.0;
  bool pass = false;
};

inline EquivalenceReport cmd_compare(const ExperimentConfig& config, const std::vector<Algorithm>& algorithms) {
  if (algorithms.size() < 2) throw InvalidArgument("compare needs at least two algorithms");
  std::set<Algorithm> unique(algorithms.begin(), algorithms.end());
  if (unique.size() != algorithms.size()) throw InvalidArgument("compare: algorithms must be distinct");

  const ExperimentData data = prepare_data(config);
  const int horizon = static_cast<int>(config.n_test);
  EquivalenceReport rep;
  rep.spectrum_tolerance = config.tolerances.spectrum;
  std::vector<MatrixXd> comps;
  std::vector<Series> forecasts;
  for (Algorithm a : algorithms) {
    if (is_primal(a) && !data.dataset.all_explicit()) {
      rep.skipped.emplace_back(a, "no explicit feature map for a primal algorithm");
      continue;
    }
    TrainedModel t;
    try {
      t = train_algorithm(data.dataset, config.s, a, config.stiefel, config.rotate);
    } catch (const UnsupportedSetting& e) {
      rep.skipped.emplace_back(a, e.what());
      continue;
    }
    MatrixXd c = comps.empty() ? t.components : linalg::sign_align(t.components, comps.front());
    comps.push_back(std::move(c));
    forecasts.push_back(forecast_with(t.saved, data.window, horizon));
    rep.trained.push_back({a, t.report, gamma_spectrum(t.saved)});
  }
  if (rep.trained.size() < 2) throw UnsupportedSetting("compare: fewer than two feasible algorithms for this config");

  rep.pass = true;
  for (std::size_t i = 0; i < rep.trained.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.trained.size(); ++j) {
      PairResult p;
      p.a = rep.trained[i].algorithm;
      p.b = rep.trained[j].algorithm;
      p.component_diff = linalg::max_abs(comps[i] - comps[j]);
      double fd = 0.0;
      for (std::size_t k = 0; k < forecasts[i].size(); ++k) fd = std::max(fd, std::abs(forecasts[i][k] - forecasts[j][k]));
      p.forecast_diff = fd;
      const VectorXd& si = rep.trained[i].spectrum;
      const VectorXd& sj = rep.trained[j].spectrum;
      const double scale = std::max(si.cwiseAbs().maxCoeff(), sj.cwiseAbs().maxCoeff());
      p.spectrum_diff = (si - sj).cwiseAbs().maxCoeff() / (scale > 0.0 ? scale : 1.0);
      p.tolerance = (is_stiefel(p.a) || is_stiefel(p.b)) ? config.tolerances.stiefel : config.tolerances.eig;
      p.pass = p.component_diff < p.tolerance && p.forecast_diff < p.tolerance && p.spectrum_diff < rep.spectrum_tolerance;
      rep.pass = rep.pass && p.pass;
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

inline Json equivalence_to_json(const EquivalenceReport& r) {
  Json trained = Json::array();
  for (const auto& e : r.trained) {
    Json j = report_to_json(e.report);
    j["spectrum"] = json_io::vector(e.spectrum);
    trained.push_back(std::move(j));
  }
  Json skipped = Json::array();
  for (const auto& [a, why] : r.skipped) skipped.push_back({{"algorithm", std::string(to_string(a))}, {"reason", why}});
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"a", std::string(to_string(p.a))},
                     {"b", std::string(to_string(p.b))},
                     {"component_max_abs_diff", p.component_diff},
                     {"forecast_max_abs_diff", p.forecast_diff},
                     {"spectrum_rel_diff", p.spectrum_diff},
                     {"tolerance", p.tolerance},
                     {"pass", p.pass}});
  }
  return {{"trained", trained}, {"skipped", skipped}, {"pairs", pairs},
          {"spectrum_tolerance", r.spectrum_tolerance}, {"pass", r.pass}};
}

inline std::string equivalence_table(const EquivalenceReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(14) << "model A" << std::setw(14) << "model B" << std::setw(13) << "components"
      << std::setw(13) << "forecast" << std::setw(13) << "spectrum" << std::setw(10) << "tol"
      << "result\n";
  out << std::scientific << std::setprecision(3);
  for (const auto& p : r.pairs) {
    out << std::setw(14) << to_string(p.a) << std::setw(14) << to_string(p.b) << std::setw(13) << p.component_diff
        << std::setw(13) << p.forecast_diff << std::setw(13) << p.spectrum_diff << std::setw(10) << p.tolerance
        << (p.pass ? "pass" : "FAIL") << "\n";
  }
  for (const auto& e : r.trained) {
    out << to_string(e.algorithm) << ": offdiag(Gamma')=" << e.report.gamma_offdiag_norm
        << " iterations=" << e.report.iterations << (e.report.converged ? "" : " (not converged)") << "\n";
  }
  for (const auto& [a, why] : r.skipped) out << "skipped " << to_string(a) << ": " << why << "\n";
  out << (r.pass ? "overall: pass" : "overall: FAIL") << "\n";
  return out.str();
}

struct GenDataRequest {
  std::string kind = "sine";
  Index length = 500;
  std::vector<double> amplitudes{1.0, 0.2};
  std::vector<double> frequencies{100.0, 2000.0};
  double sample_rate = 1e4;
  double logistic_r = 3.9;
  std::uint64_t seed = 0;
  Index burn_in = 100;
};

inline std::string series_csv(const Series& s) {
  std::ostringstream out;
  out << "value\n";
  for (double v : s) out << detail::format_number(v) << "\n";
  return out.str();
}

inline Series cmd_gen_data(const GenDataRequest& req) {
  if (req.length < 0) throw InvalidArgument("gen-data: length must be >= 0");
  if (req.kind == "sine") return gen_sum_of_sines(req.length, req.amplitudes, req.frequencies, req.sample_rate);
  if (req.kind == "logistic") return gen_logistic_map(req.length, req.logistic_r, req.seed, req.burn_in);
  throw InvalidArgument("gen-data: unknown kind '" + req.kind + "' (expected sine or logistic)");
}

inline std::string cmd_recommend(Index n, Index d_f, bool explicit_maps, bool parametric) {
  std::ostringstream out;
  try {
    const Recommendation r = select_algorithm(n, d_f, explicit_maps, parametric);
    out << "recommended: " << to_string(r.algorithm) << "\n" << r.rationale << "\n";
  } catch (const UnsupportedSetting& e) {
    out << "out of scope: " << e.what() << "\n";
  }
  return out.str();
}

}  // namespace mvkpca
