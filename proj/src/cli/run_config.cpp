#include "cli/run_config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "cli/selftest.hpp"
#include "relinfo/channel.hpp"
#include "relinfo/clustering.hpp"
#include "relinfo/discrete.hpp"
#include "relinfo/errors.hpp"
#include "relinfo/estimators.hpp"
#include "relinfo/pca.hpp"
#include "relinfo/serialization.hpp"
#include "relinfo/version.hpp"

namespace relinfo::cli {

namespace {

using nlohmann::json;

constexpr const char* kModes[] = {"channel", "pca", "ib", "estimate", "selftest"};

std::string csv_bool(bool value) { return value ? "true" : "false"; }

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write " + path.string());
  out << body;
}

struct ParsedConfig {
  std::string mode;
  json block;
  std::filesystem::path output_path;
  std::optional<std::uint64_t> seed;
  json raw;
};

ParsedConfig parse_config(const RunOptions& options) {
  std::ifstream in(options.config_path);
  if (!in) {
    throw std::invalid_argument("cannot open config: " + options.config_path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  ParsedConfig cfg;
  cfg.raw = doc;
  if (!doc.contains("mode") || !doc.at("mode").is_string()) {
    throw std::invalid_argument("config needs a string 'mode'");
  }
  cfg.mode = doc.at("mode").get<std::string>();
  bool known = false;
  for (const char* m : kModes) known = known || cfg.mode == m;
  if (!known) throw std::invalid_argument("unknown mode: " + cfg.mode);
  if (options.expected_mode && *options.expected_mode != cfg.mode) {
    throw std::invalid_argument("config mode '" + cfg.mode +
                                "' does not match the subcommand");
  }

  int blocks = 0;
  for (const char* m : kModes) {
    if (doc.contains(m)) ++blocks;
  }
  if (blocks != 1 || !doc.contains(cfg.mode)) {
    throw std::invalid_argument("config must contain exactly the '" + cfg.mode +
                                "' parameter block");
  }
  cfg.block = doc.at(cfg.mode);

  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  if (options.seed_override) cfg.seed = *options.seed_override;
  if (cfg.mode == "estimate" && !cfg.seed) {
    throw std::invalid_argument("estimate mode requires a seed");
  }

  if (options.out_dir) {
    cfg.output_path = *options.out_dir;
  } else if (doc.contains("output_path")) {
    cfg.output_path = doc.at("output_path").get<std::string>();
  } else {
    cfg.output_path = ".";
  }
  return cfg;
}

AdditiveChannel channel_from_block(const json& block) {
  const json& noise = block.at("noise");
  const std::string family = noise.at("family").get<std::string>();
  NoiseDensity density = family == "uniform"
                             ? NoiseDensity::uniform(noise.at("a").get<double>())
                         : family == "gaussian"
                             ? NoiseDensity::gaussian(noise.at("sigma").get<double>())
                             : throw std::invalid_argument("unknown noise family: " + family);
  if (block.contains("signal_values") || block.contains("signal_priors")) {
    return AdditiveChannel(block.at("signal_values").get<std::vector<double>>(),
                           block.at("signal_priors").get<std::vector<double>>(),
                           density);
  }
  return AdditiveChannel::antipodal(density);
}

GridMap grid_map_from_string(const std::string& tag) {
  if (tag == "sign") return GridMap::kSign;
  if (tag == "magnitude") return GridMap::kMagnitude;
  if (tag == "quantizer") return GridMap::kQuantizer;
  throw std::invalid_argument("unknown grid map: " + tag);
}

GridQuantity grid_quantity_from_string(const std::string& tag) {
  if (tag == "relevant_s") return GridQuantity::kRelevantS;
  if (tag == "irrelevant_s") return GridQuantity::kIrrelevantS;
  if (tag == "relevant_n") return GridQuantity::kRelevantN;
  if (tag == "irrelevant_n") return GridQuantity::kIrrelevantN;
  if (tag == "total") return GridQuantity::kTotal;
  throw std::invalid_argument("unknown grid quantity: " + tag);
}

void run_channel(const ParsedConfig& cfg, std::string& report) {
  const AdditiveChannel ch = channel_from_block(cfg.block);
  const int resolution = cfg.block.value("resolution", 512);
  std::optional<Quantizer> quantizer;
  if (cfg.block.contains("thresholds")) {
    quantizer.emplace(cfg.block.at("thresholds").get<std::vector<double>>());
  }

  std::ostringstream csv;
  csv << "quantity,analytic_value,grid_estimate,resolution,converged\n";
  auto analytic_row = [&csv](const std::string& name, double value) {
    csv << name << ',' << format_number(value) << ",,,\n";
  };

  analytic_row("input_mi", input_mutual_information(ch));
  if (ch.noise.family() == NoiseFamily::kUniform && ch.signal_values.size() == 2) {
    const auto forms = uniform_closed_forms(ch.noise.param());
    analytic_row("sign_loss", forms.sign_loss);
    analytic_row("bec_erasure", forms.bec_erasure);
    analytic_row("magnitude_relevant", forms.magnitude_relevant);
    analytic_row("magnitude_irrelevant", forms.magnitude_irrelevant);
    analytic_row("magnitude_total", forms.magnitude_total);
  }
  if (quantizer) {
    const double analytic = quantizer_relevant_loss(ch, *quantizer);
    const auto grid = grid_loss_report(ch, GridMap::kQuantizer, resolution,
                                       GridQuantity::kRelevantS, &*quantizer);
    csv << "quantizer_loss," << format_number(analytic) << ','
        << format_number(grid.estimate) << ',' << grid.resolution << ','
        << csv_bool(grid.converged) << '\n';
  }
  if (cfg.block.contains("grid")) {
    for (const auto& entry : cfg.block.at("grid")) {
      const std::string map_tag = entry.at("map").get<std::string>();
      const std::string quantity_tag = entry.at("quantity").get<std::string>();
      const GridMap map = grid_map_from_string(map_tag);
      if (map == GridMap::kQuantizer && !quantizer) {
        throw std::invalid_argument("grid quantizer rows need 'thresholds'");
      }
      const auto grid =
          grid_loss_report(ch, map, resolution, grid_quantity_from_string(quantity_tag),
                           quantizer ? &*quantizer : nullptr);
      csv << map_tag << ':' << quantity_tag << ",," << format_number(grid.estimate)
          << ',' << grid.resolution << ',' << csv_bool(grid.converged) << '\n';
    }
  }
  report = csv.str();
}

void run_pca(const ParsedConfig& cfg, const std::filesystem::path& config_dir,
             std::string& report) {
  std::optional<LinearGaussianModel> model;
  if (cfg.block.contains("model_path")) {
    std::filesystem::path p = cfg.block.at("model_path").get<std::string>();
    if (p.is_relative()) p = config_dir / p;
    model.emplace(load_model(p));
  } else {
    model.emplace(model_from_json(cfg.block));
  }
  const int n = model->dim();
  std::vector<int> kept_list;
  if (cfg.block.contains("M")) {
    kept_list.push_back(cfg.block.at("M").get<int>());
  } else {
    for (int m = 1; m < n; ++m) kept_list.push_back(m);
  }

  std::ostringstream csv;
  csv << "M,loss_nats,thm1_bound,thm2_bound,best_subset,best_subset_loss\n";
  const double mu = model->noise_cov().trace() / n;
  const bool spherical =
      (model->noise_cov() - mu * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <=
      1e-10;
  const int signal_rank = effective_rank(model->signal_cov());
  for (int kept : kept_list) {
    const double loss = gaussian_relevant_loss(*model, kept);
    const auto [subset, subset_loss] = best_coordinate_subset(*model, kept);
    std::string subset_label;
    for (size_t i = 0; i < subset.size(); ++i) {
      if (i > 0) subset_label += '+';
      subset_label += 'X' + std::to_string(subset[i] + 1);
    }
    csv << kept << ',' << format_number(loss) << ',';
    if (spherical) csv << format_number(iid_gaussian_bound(*model, kept));
    csv << ',';
    if (signal_rank <= kept) csv << format_number(eigen_bound(*model, kept));
    csv << ',' << subset_label << ',' << format_number(subset_loss) << '\n';
  }
  report = csv.str();
}

void run_ib(const ParsedConfig& cfg, const std::filesystem::path& config_dir,
            const std::filesystem::path& out_dir) {
  std::optional<JointDistribution> joint;
  if (cfg.block.contains("joint_path")) {
    std::filesystem::path p = cfg.block.at("joint_path").get<std::string>();
    if (p.is_relative()) p = config_dir / p;
    joint.emplace(load_joint(p));
  } else if (cfg.block.contains("joint")) {
    joint.emplace(joint_from_json(cfg.block.at("joint")));
  } else {
    throw std::invalid_argument("ib mode needs 'joint_path' or an inline 'joint'");
  }
  const double budget = cfg.block.at("budget_bits").get<double>();
  const auto result = agglomerative_enhance(*joint, budget);

  std::ostringstream clusters;
  clusters << "x_symbol,cluster_id\n";
  for (int x = 0; x < result.clustering.input_size(); ++x) {
    clusters << x << ',' << result.clustering.labels(x) << '\n';
  }
  write_file(out_dir / "clustering.csv", clusters.str());

  std::ostringstream trace;
  trace << "step,merged_first,merged_second,increment_bits,cumulative_bits\n";
  for (size_t i = 0; i < result.trace.size(); ++i) {
    const auto& s = result.trace[i];
    trace << i << ',' << s.first << ',' << s.second << ','
          << format_number(s.increment) << ',' << format_number(s.cumulative) << '\n';
  }
  write_file(out_dir / "trace.csv", trace.str());
}

void run_estimate(const ParsedConfig& cfg, const std::filesystem::path& out_dir,
                  std::string& report) {
  const SourceSpec source = source_from_json(cfg.block.at("source"));
  const int n = cfg.block.at("n").get<int>();
  const int k = cfg.block.value("k", 4);
  const std::uint64_t seed = *cfg.seed;

  const SampleSet samples = sample_source(source, n, seed);
  std::ostringstream csv;
  csv << "quantity,value,units,n,k,seed\n";
  csv << "knn_entropy," << format_number(knn_entropy(samples, k)) << ",nats,"
      << n << ',' << k << ',' << seed << '\n';
  if (cfg.block.contains("x_dim")) {
    const int x_dim = cfg.block.at("x_dim").get<int>();
    csv << "conditional_divergence,"
        << format_number(conditional_divergence_J(samples, x_dim, k)) << ",nats,"
        << n << ',' << k << ',' << seed << '\n';
  }
  if (cfg.block.value("dump_samples", false)) {
    write_samples_csv(samples, out_dir / "samples.csv");
  }
  report = csv.str();
}

bool run_selftest_mode(const ParsedConfig& cfg, std::string& report) {
  const int instances = cfg.block.value("instances", 100);
  std::vector<SelfTestRow> rows;
  const bool ok = run_selftest(instances, rows);
  std::ostringstream csv;
  csv << "check,instances,max_violation,pass\n";
  for (const auto& r : rows) {
    csv << r.check << ',' << r.instances << ',' << format_number(r.max_violation)
        << ',' << csv_bool(r.pass) << '\n';
  }
  report = csv.str();
  return ok;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

int run_config(const RunOptions& options, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  try {
    if (options.format != "csv") {
      throw std::invalid_argument("unsupported report format: " + options.format);
    }
    const ParsedConfig cfg = parse_config(options);
    std::filesystem::create_directories(cfg.output_path);
    const std::filesystem::path config_dir =
        options.config_path.has_parent_path() ? options.config_path.parent_path()
                                              : std::filesystem::path(".");

    bool ok = true;
    std::string report;
    if (cfg.mode == "channel") {
      run_channel(cfg, report);
    } else if (cfg.mode == "pca") {
      run_pca(cfg, config_dir, report);
    } else if (cfg.mode == "ib") {
      run_ib(cfg, config_dir, cfg.output_path);
    } else if (cfg.mode == "estimate") {
      run_estimate(cfg, cfg.output_path, report);
    } else {
      ok = run_selftest_mode(cfg, report);
    }
    if (!report.empty()) {
      write_file(cfg.output_path / "report.csv", report);
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    json manifest = {
        {"mode", cfg.mode},
        {"config_path", options.config_path.string()},
        {"config", cfg.raw},
        {"output_path", cfg.output_path.string()},
        {"tool_version", kVersion},
        {"wall_time_ms", elapsed.count()},
        {"generated_at", iso_timestamp()},
    };
    if (cfg.seed) {
      manifest["seed"] = *cfg.seed;
    } else {
      manifest["seed"] = nullptr;
    }
    write_file(cfg.output_path / "run_manifest.json", manifest.dump(2) + "\n");

    if (!ok) {
      log << "selftest found failing checks; see report.csv\n";
      return kExitNumerical;
    }
    return kExitOk;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    log << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    log << "validation error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace relinfo::cli
