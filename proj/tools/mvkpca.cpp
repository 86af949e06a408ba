// mvkpca: train, forecast, compare, gen-data, recommend.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mvkpca/mvkpca.hpp"

namespace fs = std::filesystem;
using namespace mvkpca;

namespace {

ExperimentConfig config_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                                       const std::optional<bool>& rotate) {
  ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_config(path);
  if (seed) {
    c.seed = *seed;
    c.stiefel.seed = *seed;
  }
  if (rotate) c.rotate = *rotate;
  c.validate();
  return c;
}

std::vector<Algorithm> parse_algorithm_list(const std::string& text) {
  std::vector<Algorithm> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(parse_algorithm(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal and dual multi-view kernel PCA"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<bool> rotate;
  std::optional<int> horizon;
  bool force = false;

  auto* train = app.add_subcommand("train", "train one model; writes model.json, report.json, components.csv");
  train->add_option("--config", config_path, "experiment config JSON (defaults: sum-of-sines)");
  train->add_option("--out", out_dir, "output directory (default: config output_dir)");
  train->add_option("--seed", seed, "Stiefel initialisation seed");
  train->add_option("--rotate", rotate, "rotate Stiefel solutions onto the Gamma eigenbasis");

  std::string model_path;
  std::string window_path;
  std::string truth_path;
  auto* forecast = app.add_subcommand("forecast", "recursive forecast from a model file; writes forecast.csv");
  forecast->add_option("--model", model_path, "model JSON")->required();
  forecast->add_option("--horizon", horizon, "steps to forecast (default: stored truth length)");
  forecast->add_option("--window", window_path, "seed window CSV, newest value first");
  forecast->add_option("--truth", truth_path, "truth CSV for the truth column and MSE");
  forecast->add_option("--out", out_dir, "output directory (default: .)");

  std::string algorithms = "PrimalEig,DualEig,PrimalStiefel,DualStiefel";
  auto* compare = app.add_subcommand("compare", "train several algorithms and report their equivalence");
  compare->add_option("--config", config_path, "experiment config JSON");
  compare->add_option("--algorithms", algorithms, "comma-separated list");
  compare->add_option("--out", out_dir, "output directory (default: config output_dir)");
  compare->add_option("--seed", seed, "Stiefel initialisation seed");
  compare->add_option("--rotate", rotate, "rotate Stiefel solutions");

  GenDataRequest gen;
  std::string gen_out;
  auto* gen_data = app.add_subcommand("gen-data", "write a generated series as CSV");
  gen_data->add_option("--kind", gen.kind, "sine | logistic")->capture_default_str();
  gen_data->add_option("--length", gen.length, "number of values")->capture_default_str();
  gen_data->add_option("--amplitudes", gen.amplitudes, "sine amplitudes")->delimiter(',');
  gen_data->add_option("--frequencies", gen.frequencies, "sine frequencies")->delimiter(',');
  gen_data->add_option("--sample-rate", gen.sample_rate, "sine sample rate")->capture_default_str();
  gen_data->add_option("--r", gen.logistic_r, "logistic map parameter")->capture_default_str();
  gen_data->add_option("--seed", gen.seed, "logistic initial-value seed")->capture_default_str();
  gen_data->add_option("--out", gen_out, "output CSV path")->required();
  gen_data->add_flag("--force", force, "overwrite an existing file");

  Index rec_n = 0;
  Index rec_df = 0;
  bool rec_explicit = true;
  bool rec_parametric = false;
  auto* recommend = app.add_subcommand("recommend", "suggest a training algorithm");
  recommend->add_option("--n", rec_n, "number of samples")->required();
  recommend->add_option("--df", rec_df, "total feature dimension");
  recommend->add_option("--explicit", rec_explicit, "explicit feature maps available")->capture_default_str();
  recommend->add_option("--parametric", rec_parametric, "parametric (trainable) feature maps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) {
      const ExperimentConfig c = config_with_overrides(config_path, seed, rotate);
      const TrainOutputs o = cmd_train(c, out_dir.empty() ? fs::path(c.output_dir) : fs::path(out_dir));
      std::cout << "wrote " << o.model.string() << ", " << o.report.string() << ", " << o.components.string() << "\n";
    } else if (*forecast) {
      ForecastRequest req;
      req.model_path = model_path;
      req.horizon = horizon;
      if (!window_path.empty()) req.window_path = window_path;
      if (!truth_path.empty()) req.truth_path = truth_path;
      const fs::path out = (out_dir.empty() ? fs::path(".") : fs::path(out_dir)) / "forecast.csv";
      write_file_atomic(out, cmd_forecast(req));
      std::cout << "wrote " << out.string() << "\n";
    } else if (*compare) {
      const ExperimentConfig c = config_with_overrides(config_path, seed, rotate);
      const EquivalenceReport r = cmd_compare(c, parse_algorithm_list(algorithms));
      const fs::path out = (out_dir.empty() ? fs::path(c.output_dir) : fs::path(out_dir)) / "equivalence.json";
      write_file_atomic(out, equivalence_to_json(r).dump(2) + "\n");
      std::cout << equivalence_table(r) << "wrote " << out.string() << "\n";
      return r.pass ? kExitOk : kExitComputation;
    } else if (*gen_data) {
      const Series s = cmd_gen_data(gen);
      write_file_atomic(gen_out, series_csv(s), force);
      std::cout << "wrote " << s.size() << " values to " << gen_out << "\n";
    } else if (*recommend) {
      std::cout << cmd_recommend(rec_n, rec_df, rec_explicit, rec_parametric);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}
