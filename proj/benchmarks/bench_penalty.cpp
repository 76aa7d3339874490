#include <benchmark/benchmark.h>

#include <random>

#include "mtlrrc/penalty.hpp"

using namespace mtlrrc;

static Eigen::MatrixXd random_rows(int rows, int cols) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist(0.0, 2.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  }
  return m;
}

static void ThresholdRows(benchmark::State& state, PenaltySpec spec) {
  const Eigen::MatrixXd z = random_rows(256, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    for (int i = 0; i < z.rows(); ++i) {
      benchmark::DoNotOptimize(threshold(z.row(i).transpose(), spec));
    }
  }
  state.SetItemsProcessed(state.iterations() * z.rows());
}

BENCHMARK_CAPTURE(ThresholdRows, group_lasso, PenaltySpec::group_lasso(1.0))->Range(8, 512);
BENCHMARK_CAPTURE(ThresholdRows, group_scad, PenaltySpec::group_scad(1.0, 3.7))->Range(8, 512);
BENCHMARK_CAPTURE(ThresholdRows, group_mcp, PenaltySpec::group_mcp(1.0, 3.0))->Range(8, 512);
BENCHMARK_CAPTURE(ThresholdRows, multi_tukey, PenaltySpec::multi_tukey(2.0))->Range(8, 512);

BENCHMARK_MAIN();
