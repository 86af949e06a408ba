#pragma once

// JSON documents for models and training reports.

#include <Eigen/Dense>
#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mvkpca/core.hpp"
#include "mvkpca/errors.hpp"
#include "mvkpca/kernels.hpp"
#include "mvkpca/random.hpp"
#include "mvkpca/training.hpp"

namespace mvkpca {

using Json = nlohmann::json;

inline constexpr const char* kModelFormat = "mvkpca-model";
inline constexpr int kModelVersion = 1;

/// Lag order, seed window and held-out values stored next to a forecasting
/// model so that `forecast` can run from the model file alone.
struct ForecastContext {
  int p = 1;
  VectorXd window;  // newest first
  std::vector<double> truth;
};

struct SavedModel {
  std::variant<PrimalModel, DualModel> model;
  std::optional<ForecastContext> forecast;

  bool is_primal() const { return std::holds_alternative<PrimalModel>(model); }
  const std::vector<ViewConfig>& view_configs() const {
    return std::visit([](const auto& m) -> const std::vector<ViewConfig>& { return m.view_configs; }, model);
  }
};

namespace json_io {

inline Json matrix(const MatrixXd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector(const VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ParseError("JSON field '" + path + "': " + what);
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

inline std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline std::int64_t integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    fail(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline std::string string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

inline VectorXd vector(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

inline MatrixXd matrix(const Json& j, const std::string& path, Index expect_rows = -1, Index expect_cols = -1) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = expect_cols;
  if (cols < 0) cols = rows > 0 && j[0].is_array() ? static_cast<Index>(j[0].size()) : 0;
  if (expect_rows >= 0 && rows != expect_rows) {
    fail(path, "expected " + std::to_string(expect_rows) + " rows, found " + std::to_string(rows));
  }
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      fail(rp, "expected a row of " + std::to_string(cols) + " numbers");
    }
    for (Index c = 0; c < cols; ++c) m(i, c) = number(row[static_cast<std::size_t>(c)], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline Json kernel(const KernelSpec& spec) {
  Json j{{"type", kernel_name(spec)}};
  if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
    j["bandwidth"] = g->bandwidth;
  } else if (const auto* r = std::get_if<RffKernel>(&spec)) {
    j["bandwidth"] = r->bandwidth;
    j["feature_dim"] = r->feature_dim;
    j["seed"] = r->seed;
    j["rng"] = DeterministicRng::kName;
  }
  return j;
}

inline KernelSpec kernel(const Json& j, const std::string& path) {
  const std::string type = string(field(j, "type", path), join(path, "type"));
  KernelSpec spec;
  if (type == "linear") {
    spec = LinearKernel{};
  } else if (type == "gaussian") {
    spec = GaussianKernel{number(field(j, "bandwidth", path), join(path, "bandwidth"))};
  } else if (type == "rff") {
    if (j.contains("rng") && string(j["rng"], join(path, "rng")) != DeterministicRng::kName) {
      fail(join(path, "rng"), "unsupported generator '" + j["rng"].get<std::string>() + "', expected '" +
                                  DeterministicRng::kName + "'");
    }
    const std::int64_t d = integer(field(j, "feature_dim", path), join(path, "feature_dim"));
    spec = RffKernel{number(field(j, "bandwidth", path), join(path, "bandwidth")), static_cast<int>(d),
                     unsigned_integer(field(j, "seed", path), join(path, "seed"))};
  } else {
    fail(join(path, "type"), "unknown kernel type '" + type + "'");
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return spec;
}

inline Json views(const std::vector<ViewConfig>& configs) {
  Json out = Json::array();
  for (const auto& c : configs) {
    out.push_back({{"name", c.name}, {"role", std::string(to_string(c.role))}, {"kernel", kernel(c.kernel)}});
  }
  return out;
}

inline std::vector<ViewConfig> views(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of views");
  std::vector<ViewConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string vp = path + "[" + std::to_string(i) + "]";
    ViewConfig c;
    c.name = string(field(j[i], "name", vp), join(vp, "name"));
    const std::string role = j[i].contains("role") ? string(j[i]["role"], join(vp, "role")) : "input";
    if (role == "input") c.role = ViewRole::Input;
    else if (role == "target") c.role = ViewRole::Target;
    else fail(join(vp, "role"), "expected 'input' or 'target'");
    c.kernel = kernel(field(j[i], "kernel", vp), join(vp, "kernel"));
    out.push_back(std::move(c));
  }
  try {
    validate_view_configs(out);
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return out;
}

}  // namespace json_io

// ---------------------------------------------------------------------------

inline Json model_to_json(const SavedModel& saved) {
  Json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  if (const auto* p = std::get_if<PrimalModel>(&saved.model)) {
    j["kind"] = "primal";
    j["s"] = p->s;
    j["views"] = json_io::views(p->view_configs);
    j["block_offsets"] = p->block_offsets;
    Json means = Json::array();
    for (const auto& m : p->feature_means) means.push_back(json_io::vector(m));
    j["feature_means"] = std::move(means);
    j["Gamma"] = json_io::matrix(p->Gamma);
    j["U"] = json_io::matrix(p->U);
    j["U_tilde"] = json_io::matrix(p->U_tilde);
  } else {
    const auto& d = std::get<DualModel>(saved.model);
    j["kind"] = "dual";
    j["s"] = d.s;
    j["views"] = json_io::views(d.view_configs);
    j["Gamma"] = json_io::matrix(d.Gamma);
    j["H"] = json_io::matrix(d.H);
    Json data = Json::array();
    for (const auto& x : d.train_data) data.push_back(json_io::matrix(x));
    j["train_data"] = std::move(data);
  }
  if (saved.forecast) {
    j["forecast"] = {{"p", saved.forecast->p},
                     {"window", json_io::vector(saved.forecast->window)},
                     {"truth", saved.forecast->truth}};
  }
  return j;
}

inline SavedModel model_from_json(const Json& j) {
  using namespace json_io;
  if (!j.is_object()) fail("<root>", "expected an object");
  if (string(field(j, "format", ""), "format") != kModelFormat) fail("format", "not an mvkpca model document");
  const std::int64_t version = integer(field(j, "version", ""), "version");
  if (version != kModelVersion) fail("version", "unsupported version " + std::to_string(version));
  const std::string kind = string(field(j, "kind", ""), "kind");
  const std::int64_t s = integer(field(j, "s", ""), "s");
  if (s < 1) fail("s", "must be positive");
  std::vector<ViewConfig> configs = views(field(j, "views", ""), "views");
  const std::size_t nv = configs.size();

  SavedModel out;
  if (kind == "primal") {
    PrimalModel m;
    m.s = s;
    m.view_configs = std::move(configs);
    const Json& offsets = field(j, "block_offsets", "");
    if (!offsets.is_array() || offsets.size() != nv + 1) fail("block_offsets", "expected V + 1 integers");
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      const std::int64_t o = integer(offsets[i], "block_offsets[" + std::to_string(i) + "]");
      if (o < 0 || (i > 0 && o < m.block_offsets.back())) fail("block_offsets", "must be non-decreasing from 0");
      m.block_offsets.push_back(o);
    }
    if (m.block_offsets.front() != 0) fail("block_offsets", "must start at 0");
    const Json& means = field(j, "feature_means", "");
    if (!means.is_array() || means.size() != nv) fail("feature_means", "expected one vector per view");
    for (std::size_t v = 0; v < nv; ++v) {
      const std::string path = "feature_means[" + std::to_string(v) + "]";
      m.feature_means.push_back(vector(means[v], path));
      if (m.feature_means.back().size() != m.block_offsets[v + 1] - m.block_offsets[v]) {
        fail(path, "length does not match block_offsets");
      }
    }
    const Index d_f = m.block_offsets.back();
    m.Gamma = matrix(field(j, "Gamma", ""), "Gamma", s, s);
    m.U = matrix(field(j, "U", ""), "U", d_f, s);
    m.U_tilde = matrix(field(j, "U_tilde", ""), "U_tilde", d_f, s);
    out.model = std::move(m);
  } else if (kind == "dual") {
    DualModel m;
    m.s = s;
    m.view_configs = std::move(configs);
    m.Gamma = matrix(field(j, "Gamma", ""), "Gamma", s, s);
    m.H = matrix(field(j, "H", ""), "H", -1, s);
    const Json& data = field(j, "train_data", "");
    if (!data.is_array() || data.size() != nv) fail("train_data", "expected one matrix per view");
    for (std::size_t v = 0; v < nv; ++v) {
      const std::string path = "train_data[" + std::to_string(v) + "]";
      m.train_data.push_back(matrix(data[v], path, m.H.rows()));
      m.train_grams_uncentered.push_back(gram_matrix(m.view_configs[v].kernel, m.train_data.back()));
    }
    out.model = std::move(m);
  } else {
    fail("kind", "expected 'primal' or 'dual', found '" + kind + "'");
  }

  if (j.contains("forecast")) {
    const Json& f = j["forecast"];
    ForecastContext ctx;
    const std::int64_t p = integer(field(f, "p", "forecast"), "forecast.p");
    if (p < 1) fail("forecast.p", "must be positive");
    ctx.p = static_cast<int>(p);
    ctx.window = vector(field(f, "window", "forecast"), "forecast.window");
    if (ctx.window.size() != p + 1) fail("forecast.window", "expected p + 1 values");
    if (f.contains("truth")) {
      const VectorXd t = vector(f["truth"], "forecast.truth");
      ctx.truth.assign(t.data(), t.data() + t.size());
    }
    out.forecast = std::move(ctx);
  }
  return out;
}

inline std::string dump_model(const SavedModel& saved) { return model_to_json(saved).dump(2) + "\n"; }

inline SavedModel parse_model(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("model JSON is malformed: ") + e.what());
  }
  return model_from_json(j);
}

inline Json report_to_json(const TrainReport& r) {
  return {{"algorithm", std::string(to_string(r.algorithm))},
          {"iterations", r.iterations},
          {"final_objective", r.final_objective},
          {"gamma_offdiag_norm", r.gamma_offdiag_norm},
          {"rotated", r.rotated},
          {"converged", r.converged}};
}

inline TrainReport report_from_json(const Json& j) {
  using namespace json_io;
  TrainReport r;
  try {
    r.algorithm = parse_algorithm(string(field(j, "algorithm", ""), "algorithm"));
  } catch (const InvalidArgument& e) {
    fail("algorithm", e.what());
  }
  r.iterations = static_cast<int>(integer(field(j, "iterations", ""), "iterations"));
  r.final_objective = number(field(j, "final_objective", ""), "final_objective");
  r.gamma_offdiag_norm = number(field(j, "gamma_offdiag_norm", ""), "gamma_offdiag_norm");
  r.rotated = boolean(field(j, "rotated", ""), "rotated");
  r.converged = boolean(field(j, "converged", ""), "converged");
  return r;
}

}  // namespace mvkpca
