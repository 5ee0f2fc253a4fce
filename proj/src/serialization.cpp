#include "relinfo/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace relinfo {

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("invalid JSON in " + path.string() + ": " + e.what());
  }
  return doc;
}

void write_text_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot write file: " + path.string());
  }
  out << body;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, const char* what) {
  if (!rows.is_array() || rows.empty()) {
    throw std::invalid_argument(std::string(what) + " must be a nonempty array of rows");
  }
  const size_t n = rows.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows[0].size()));
  for (size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != static_cast<size_t>(m.cols())) {
      throw std::invalid_argument(std::string(what) + " rows have inconsistent lengths");
    }
    for (size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c].get<double>();
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) {
    throw std::invalid_argument(std::string(what) + " must be an array");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (size_t i = 0; i < arr.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

}  // namespace

nlohmann::json to_json(const JointDistribution& joint) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : joint.variables()) {
    vars.push_back({{"name", v.name}, {"size", v.size}});
  }
  return {{"variables", std::move(vars)}, {"mass", joint.mass()}};
}

JointDistribution joint_from_json(const nlohmann::json& doc) {
  if (!doc.contains("variables") || !doc.contains("mass")) {
    throw std::invalid_argument("joint distribution needs 'variables' and 'mass'");
  }
  std::vector<Variable> vars;
  for (const auto& v : doc.at("variables")) {
    vars.push_back({v.at("name").get<std::string>(), v.at("size").get<int>()});
  }
  return JointDistribution(std::move(vars),
                           doc.at("mass").get<std::vector<double>>());
}

JointDistribution load_joint(const std::filesystem::path& path) {
  return joint_from_json(read_json_file(path));
}

void save_joint(const JointDistribution& joint, const std::filesystem::path& path) {
  write_text_file(path, to_json(joint).dump(2) + "\n");
}

nlohmann::json to_json(const LinearGaussianModel& model) {
  return {{"signal_cov", matrix_to_json(model.signal_cov())},
          {"noise_cov", matrix_to_json(model.noise_cov())}};
}

LinearGaussianModel model_from_json(const nlohmann::json& doc) {
  if (!doc.contains("signal_cov") || !doc.contains("noise_cov")) {
    throw std::invalid_argument("model needs 'signal_cov' and 'noise_cov'");
  }
  return LinearGaussianModel(matrix_from_json(doc.at("signal_cov"), "signal_cov"),
                             matrix_from_json(doc.at("noise_cov"), "noise_cov"));
}

LinearGaussianModel load_model(const std::filesystem::path& path) {
  return model_from_json(read_json_file(path));
}

void save_model(const LinearGaussianModel& model, const std::filesystem::path& path) {
  write_text_file(path, to_json(model).dump(2) + "\n");
}

SourceSpec source_from_json(const nlohmann::json& doc) {
  const std::string family = doc.at("family").get<std::string>();
  SourceSpec spec;
  if (family == "gaussian") {
    spec = SourceSpec::gaussian(vector_from_json(doc.at("mean"), "mean"),
                                matrix_from_json(doc.at("cov"), "cov"));
  } else if (family == "uniform") {
    spec = SourceSpec::uniform_box(vector_from_json(doc.at("lo"), "lo"),
                                   vector_from_json(doc.at("hi"), "hi"));
  } else if (family == "laplace") {
    spec = SourceSpec::laplace(vector_from_json(doc.at("mean"), "mean"),
                               vector_from_json(doc.at("scale"), "scale"));
  } else if (family == "gaussian-mixture") {
    spec = SourceSpec::gaussian_mixture(
        vector_from_json(doc.at("weights"), "weights"),
        matrix_from_json(doc.at("means"), "means"),
        vector_from_json(doc.at("sigmas"), "sigmas"));
  } else {
    throw std::invalid_argument("unknown source family: " + family);
  }
  if (doc.contains("transform")) {
    spec.transform = matrix_from_json(doc.at("transform"), "transform");
    spec.validate();
  }
  return spec;
}

void write_samples_csv(const SampleSet& samples, const std::filesystem::path& path) {
  std::string body;
  for (int i = 0; i < samples.count(); ++i) {
    for (int d = 0; d < samples.dim; ++d) {
      if (d > 0) body += ',';
      body += format_number(samples.points(i, d));
    }
    body += '\n';
  }
  write_text_file(path, body);
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace relinfo
