#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "mtlrrc/io.hpp"
#include "mtlrrc/simulate.hpp"
#include "test_support.hpp"

using namespace mtlrrc;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mtlrrc_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("dataset dump and ingest round-trip exactly") {
  SimConfig cfg;
  cfg.n_tasks = 2;
  cfg.n_features = 3;
  cfg.n_clusters = 2;
  cfg.n_samples = 3;
  cfg.seed = 41;
  const auto [data, truth] = generate(cfg);

  TempDir tmp;
  write_dataset(tmp.path.string(), data);
  const MultiTaskData loaded = ingest(tmp.path.string());
  REQUIRE(loaded.n_tasks() == 2);
  for (int m = 0; m < 2; ++m) {
    CHECK(loaded.tasks[m].X == data.tasks[m].X);
    CHECK(loaded.tasks[m].y == data.tasks[m].y);
    CHECK(loaded.tasks[m].family == Family::Gaussian);
  }
}

TEST_CASE("ingest without a manifest reads sorted csv files") {
  TempDir tmp;
  write_text_file((tmp.path / "b.csv").string(), "y,feature_1\n1,2\n");
  write_text_file((tmp.path / "a.csv").string(), "y,feature_1\n3,4\n");
  const MultiTaskData data = ingest(tmp.path.string());
  REQUIRE(data.n_tasks() == 2);
  CHECK(data.tasks[0].y[0] == 3.0);  // a.csv first
  CHECK(data.tasks[1].y[0] == 1.0);
}

TEST_CASE("ingest errors name the offending file and column") {
  TempDir tmp;
  write_text_file((tmp.path / "t1.csv").string(), "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(ingest(tmp.path.string()), doctest::Contains("t1.csv"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(ingest(tmp.path.string()), doctest::Contains("'y'"), std::runtime_error);

  fs::remove(tmp.path / "t1.csv");
  write_text_file((tmp.path / "t1.csv").string(), "y,f1,f2\n0,1,2\n");
  write_text_file((tmp.path / "t2.csv").string(), "y,f1,g2\n0,1,2\n");
  CHECK_THROWS_WITH_AS(ingest(tmp.path.string()), doctest::Contains("g2"), std::runtime_error);
}

TEST_CASE("bernoulli labels are validated on ingest") {
  TempDir tmp;
  write_text_file((tmp.path / "t1.csv").string(), "y,f1\n0,0.5\n2,0.25\n");
  write_text_file((tmp.path / "manifest.json").string(),
                  "{\"family\": \"bernoulli\", \"tasks\": [\"t1.csv\"]}\n");
  CHECK_THROWS_WITH_AS(ingest(tmp.path.string()), doctest::Contains("t1.csv"),
                       std::runtime_error);
}

TEST_CASE("malformed numbers are reported with file and line") {
  TempDir tmp;
  write_text_file((tmp.path / "t1.csv").string(), "y,f1\n1,2\n1,oops\n");
  CHECK_THROWS_WITH_AS(ingest(tmp.path.string()), doctest::Contains(":3"), std::runtime_error);
}

TEST_CASE("fit result serializes with a fixed field order") {
  FitResult result;
  result.params.w0 = Eigen::VectorXd::Zero(2);
  result.params.W = Eigen::MatrixXd::Identity(2, 2);
  result.params.U = Eigen::MatrixXd::Zero(2, 2);
  result.params.O = Eigen::MatrixXd::Zero(2, 2);
  result.outlier_tasks = {1};
  result.cluster_labels = {0, 0};
  result.objective_trace = {2.0, 1.0};
  result.outer_iters = 2;
  result.converged = true;
  const std::string json = fit_result_to_json(result);
  size_t last = 0;
  for (const char* key : {"\"w0\"", "\"W\"", "\"U\"", "\"O\"", "\"outlier_tasks\"",
                          "\"cluster_labels\"", "\"objective_trace\"", "\"outer_iters\"",
                          "\"converged\"", "\"stationarity\""}) {
    const size_t pos = json.find(key);
    REQUIRE(pos != std::string::npos);
    CHECK(pos > last);
    last = pos;
  }
  // 1-based task ids in emitted files
  CHECK(json.find("\"outlier_tasks\": [\n    2\n  ]") != std::string::npos);
}

TEST_CASE("matrix csv uses 1-based task column") {
  TempDir tmp;
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4.5;
  const std::string path = (tmp.path / "m.csv").string();
  write_matrix_csv(path, m);
  CHECK(read_text_file(path) == "task,feature_1,feature_2\n1,1,2\n2,3,4.5\n");
}

TEST_CASE("metric report csv leaves absent metrics empty") {
  MetricReport report;
  report.method = "mtlrrc_gs";
  report.kappa = 0.25;
  report.replicate = 3;
  report.nmse = 0.5;
  const std::string csv = metric_reports_to_csv({report});
  CHECK(csv ==
        "method,kappa,replicate,nmse,rmse,tpr,fpr,auc\n"
        "mtlrrc_gs,0.25,3,0.5,,,,\n");
}
