#include "mtlrrc/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mtlrrc/util.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace mtlrrc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

double parse_double(const std::string& token, const std::string& file, size_t line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(file + ":" + std::to_string(line_no) + ": cannot parse number '" +
                             token + "'");
  }
}

ordered_json matrix_to_json(const Eigen::MatrixXd& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json vector_to_json(const Eigen::VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_task_csv(const std::string& path, const TaskDataset& task) {
  std::string out = "y";
  for (int j = 1; j <= task.p(); ++j) out += ",feature_" + std::to_string(j);
  out += '\n';
  for (int i = 0; i < task.n(); ++i) {
    out += format_double(task.y[i]);
    for (int j = 0; j < task.p(); ++j) {
      out += ',';
      out += format_double(task.X(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void write_dataset(const std::string& dir, const MultiTaskData& data) {
  fs::create_directories(dir);
  ordered_json manifest;
  manifest["family"] = to_string(data.family());
  ordered_json files = ordered_json::array();
  for (int m = 0; m < data.n_tasks(); ++m) {
    char name[32];
    std::snprintf(name, sizeof(name), "task_%03d.csv", m + 1);
    write_task_csv((fs::path(dir) / name).string(), data.tasks[m]);
    files.push_back(name);
  }
  manifest["tasks"] = std::move(files);
  write_text_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

namespace {

TaskDataset read_task_csv(const std::string& path, Family family,
                          std::vector<std::string>* schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  const std::vector<std::string> header = split_csv_line(strip_cr(line));

  int y_col = -1;
  std::vector<std::string> features;
  for (size_t j = 0; j < header.size(); ++j) {
    if (header[j] == "y") {
      if (y_col >= 0) throw std::runtime_error(path + ": duplicate column 'y'");
      y_col = static_cast<int>(j);
    } else {
      features.push_back(header[j]);
    }
  }
  if (y_col < 0) throw std::runtime_error(path + ": missing required column 'y'");
  if (schema->empty()) {
    *schema = features;
  } else if (*schema != features) {
    std::string column = "<order>";
    for (size_t j = 0; j < std::min(schema->size(), features.size()); ++j) {
      if ((*schema)[j] != features[j]) {
        column = features[j];
        break;
      }
    }
    throw std::runtime_error(path + ": feature schema mismatch at column '" + column + "'");
  }

  std::vector<double> y_values;
  std::vector<double> x_values;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    for (size_t j = 0; j < fields.size(); ++j) {
      const double v = parse_double(fields[j], path, line_no);
      if (static_cast<int>(j) == y_col) {
        y_values.push_back(v);
      } else {
        x_values.push_back(v);
      }
    }
  }
  if (y_values.empty()) throw std::runtime_error(path + ": no data rows");

  TaskDataset task;
  task.family = family;
  const int n = static_cast<int>(y_values.size());
  const int p = static_cast<int>(features.size());
  task.y = Eigen::Map<Eigen::VectorXd>(y_values.data(), n);
  task.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) task.X(i, j) = x_values[static_cast<size_t>(i) * p + j];
  }
  if (family == Family::Bernoulli) {
    for (int i = 0; i < n; ++i) {
      if (task.y[i] != 0.0 && task.y[i] != 1.0) {
        throw std::runtime_error(path + ": Bernoulli label '" + format_double(task.y[i]) +
                                 "' is not 0 or 1");
      }
    }
  }
  return task;
}

}  // namespace

MultiTaskData ingest(const std::string& data_dir) {
  if (!fs::is_directory(data_dir)) {
    throw std::runtime_error(data_dir + " is not a directory");
  }
  Family family = Family::Gaussian;
  std::vector<std::string> files;
  const fs::path manifest_path = fs::path(data_dir) / "manifest.json";
  if (fs::exists(manifest_path)) {
    const auto manifest = ordered_json::parse(read_text_file(manifest_path.string()));
    if (manifest.contains("family")) {
      family = family_from_string(manifest.at("family").get<std::string>());
    }
    for (const auto& f : manifest.at("tasks")) {
      files.push_back((fs::path(data_dir) / f.get<std::string>()).string());
    }
  } else {
    for (const auto& entry : fs::directory_iterator(data_dir)) {
      if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw std::runtime_error(data_dir + ": no task files found");

  MultiTaskData data;
  std::vector<std::string> schema;
  for (const auto& file : files) {
    data.tasks.push_back(read_task_csv(file, family, &schema));
  }
  data.validate();
  return data;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M) {
  std::string out = "task";
  for (Eigen::Index j = 1; j <= M.cols(); ++j) out += ",feature_" + std::to_string(j);
  out += '\n';
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    out += std::to_string(i + 1);
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      out += ',';
      out += format_double(M(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

std::string fit_result_to_json(const FitResult& result) {
  ordered_json j;
  j["w0"] = vector_to_json(result.params.w0);
  j["W"] = matrix_to_json(result.params.W);
  j["U"] = matrix_to_json(result.params.U);
  j["O"] = matrix_to_json(result.params.O);
  ordered_json outliers = ordered_json::array();
  for (int m : result.outlier_tasks) outliers.push_back(m + 1);
  j["outlier_tasks"] = std::move(outliers);
  ordered_json labels = ordered_json::array();
  for (int c : result.cluster_labels) labels.push_back(c + 1);
  j["cluster_labels"] = std::move(labels);
  j["objective_trace"] = result.objective_trace;
  j["outer_iters"] = result.outer_iters;
  j["converged"] = result.converged;
  j["stationarity"] = {{"regression", result.stationarity.regression},
                       {"clustering", result.stationarity.clustering}};
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

void write_fit_result_json(const std::string& path, const FitResult& result) {
  write_text_file(path, fit_result_to_json(result));
}

std::string ground_truth_to_json(const GroundTruth& truth) {
  ordered_json j;
  j["W_true"] = matrix_to_json(truth.W_true);
  ordered_json clusters = ordered_json::array();
  for (int c : truth.cluster_of) clusters.push_back(c + 1);
  j["cluster_of"] = std::move(clusters);
  ordered_json outliers = ordered_json::array();
  for (char b : truth.is_outlier) outliers.push_back(static_cast<bool>(b));
  j["is_outlier"] = std::move(outliers);
  j["u_true"] = matrix_to_json(truth.u_true);
  j["shift_true"] = matrix_to_json(truth.shift_true);
  return j.dump(2) + "\n";
}

void write_ground_truth_json(const std::string& path, const GroundTruth& truth) {
  write_text_file(path, ground_truth_to_json(truth));
}

std::string standardize_stats_to_json(const StandardizeStats& stats) {
  ordered_json j;
  ordered_json means = ordered_json::array(), scales = ordered_json::array();
  for (const auto& v : stats.x_mean) means.push_back(vector_to_json(v));
  for (const auto& v : stats.x_scale) scales.push_back(vector_to_json(v));
  j["x_mean"] = std::move(means);
  j["x_scale"] = std::move(scales);
  j["y_mean"] = stats.y_mean;
  return j.dump(2) + "\n";
}

namespace {

ordered_json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

}  // namespace

std::string metric_report_to_json(const MetricReport& report) {
  ordered_json j;
  j["method"] = report.method;
  j["kappa"] = report.kappa;
  j["replicate"] = report.replicate;
  j["nmse"] = optional_to_json(report.nmse);
  j["rmse"] = optional_to_json(report.rmse);
  j["tpr"] = optional_to_json(report.tpr);
  j["fpr"] = optional_to_json(report.fpr);
  j["auc"] = optional_to_json(report.auc);
  j["per_task_nmse"] = report.per_task_nmse;
  return j.dump(2) + "\n";
}

std::string metric_reports_to_csv(const std::vector<MetricReport>& rows) {
  std::string out = "method,kappa,replicate,nmse,rmse,tpr,fpr,auc\n";
  const auto cell = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& r : rows) {
    out += r.method + ',' + format_double(r.kappa) + ',' + std::to_string(r.replicate) + ',' +
           cell(r.nmse) + ',' + cell(r.rmse) + ',' + cell(r.tpr) + ',' + cell(r.fpr) + ',' +
           cell(r.auc) + '\n';
  }
  return out;
}

}  // namespace mtlrrc
