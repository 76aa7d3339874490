#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mtlrrc/io.hpp"
#include "mtlrrc/pipeline.hpp"

using namespace mtlrrc;
namespace fs = std::filesystem;

namespace {

// Small but realistic bench configuration; tuned to run in seconds.
RunConfig small_bench_config() {
  RunConfig cfg;
  cfg.mode = RunMode::Bench;
  cfg.sim.n_tasks = 9;
  cfg.sim.n_features = 4;
  cfg.sim.n_clusters = 3;
  cfg.sim.n_samples = 24;
  cfg.sim.sigma2 = 1.0;
  cfg.sim.kappa = 0.25;
  cfg.sim.regime = OutlierRegime::Structureless;
  cfg.seed = 3;
  cfg.replicates = 2;
  cfg.k = 2;
  cfg.split_counts = {8, 8, 8};
  cfg.grids.lambda1 = {0.5};
  cfg.grids.lambda2 = {0.2};
  cfg.grids.lambda3 = {1.0, 10.0};
  cfg.methods = {"mtlrrc_gs", "mtlcvx", "hmtlk"};
  cfg.fit.tol = 1e-7;
  cfg.fit.max_outer = 400;
  return cfg;
}

std::pair<MultiTaskData, MultiTaskData> standardized_splits(const SimConfig& sim,
                                                            const SplitCounts& counts) {
  auto [data, truth] = generate(sim);
  SplitResult splits = split(data, counts, sim.seed);
  const StandardizeStats stats = standardize(splits.train);
  apply_standardization(splits.val, stats);
  return {std::move(splits.train), std::move(splits.val)};
}

}  // namespace

TEST_CASE("log-spaced default grids") {
  const Grids g = Grids::defaults();
  CHECK(g.lambda1.size() == 7);
  CHECK(g.lambda2.size() == 9);
  CHECK(g.lambda3.size() == 7);
  CHECK(g.lambda1.front() == doctest::Approx(0.01));
  CHECK(g.lambda1.back() == doctest::Approx(10.0));
  CHECK(g.lambda2.back() == doctest::Approx(100.0));
  CHECK(g.lambda3.front() == doctest::Approx(0.1));
}

TEST_CASE("grid of size one returns that point") {
  SimConfig sim;
  sim.n_tasks = 6;
  sim.n_features = 3;
  sim.n_clusters = 2;
  sim.n_samples = 20;
  sim.seed = 5;
  auto [train, val] = standardized_splits(sim, {10, 6, 4});

  RunConfig cfg;
  cfg.k = 2;
  cfg.grids.lambda1 = {0.7};
  cfg.grids.lambda2 = {0.3};
  cfg.grids.lambda3 = {0.9};
  const GridSearchResult result = grid_search(train, val, cfg, PenaltyFamily::GroupSCAD, false);
  CHECK(result.best.lambda1 == 0.7);
  CHECK(result.best.lambda2 == 0.3);
  CHECK(result.best.lambda3 == 0.9);
  CHECK(result.table.size() == 1);
  CHECK(result.table[0].ok);
}

TEST_CASE("selection is the argmin of the validation losses") {
  SimConfig sim;
  sim.n_tasks = 6;
  sim.n_features = 3;
  sim.n_clusters = 2;
  sim.n_samples = 24;
  sim.kappa = 0.3;
  sim.regime = OutlierRegime::Structureless;
  sim.seed = 7;
  auto [train, val] = standardized_splits(sim, {10, 8, 6});

  RunConfig cfg;
  cfg.k = 2;
  cfg.grids.lambda1 = {0.3, 1.0};
  cfg.grids.lambda2 = {0.1, 0.5};
  cfg.grids.lambda3 = {0.5, 5.0};
  const GridSearchResult result = grid_search(train, val, cfg, PenaltyFamily::GroupSCAD, false);

  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& point : result.table) {
    REQUIRE(point.ok);
    best_loss = std::min(best_loss, point.validation_loss);
  }
  // the refit best reproduces the tabled loss
  const double refit_loss =
      validation_loss(val, result.best_fit.params.w0, result.best_fit.params.W);
  CHECK(refit_loss == doctest::Approx(best_loss).epsilon(1e-12));
  // chosen lambda3 is finite and nonzero on an instance with planted outliers
  CHECK(result.best.lambda3 > 0.0);
  CHECK(std::isfinite(result.best.lambda3));
}

TEST_CASE("frozen-outlier baseline equals the huge-lambda3 limit on clean data") {
  SimConfig sim;
  sim.n_tasks = 6;
  sim.n_features = 3;
  sim.n_clusters = 2;
  sim.n_samples = 24;
  sim.kappa = 0.0;
  sim.seed = 11;
  auto [train, val] = standardized_splits(sim, {12, 8, 4});

  RunConfig cfg;
  cfg.k = 2;
  cfg.grids.lambda1 = {0.5};
  cfg.grids.lambda2 = {0.4};
  cfg.grids.lambda3 = {1e9};
  const GridSearchResult frozen = grid_search(train, val, cfg, PenaltyFamily::GroupLasso, true);
  const GridSearchResult huge = grid_search(train, val, cfg, PenaltyFamily::GroupLasso, false);
  CHECK(frozen.best_fit.params.O.isZero(0.0));
  CHECK(huge.best_fit.params.O.isZero(0.0));
  CHECK((frozen.best_fit.params.W - huge.best_fit.params.W).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(validation_loss(val, frozen.best_fit.params.w0, frozen.best_fit.params.W) ==
        doctest::Approx(validation_loss(val, huge.best_fit.params.w0, huge.best_fit.params.W))
            .epsilon(1e-12));
}

TEST_CASE("bench emits rows for every method and replicate") {
  RunConfig cfg = small_bench_config();
  const BenchOutput out = bench(cfg);
  REQUIRE(out.rows.size() == 6);
  for (size_t i = 0; i < out.rows.size(); ++i) {
    CHECK(out.rows[i].method == cfg.methods[i % 3]);
    CHECK(out.rows[i].replicate == static_cast<int>(i / 3) + 1);
    CHECK(out.rows[i].nmse.has_value());
    CHECK(out.rows[i].rmse.has_value());
  }
  // summary means equal the naive average of the replicate rows
  double gs_nmse = 0.0;
  int count = 0;
  for (const auto& row : out.rows) {
    if (row.method == "mtlrrc_gs") {
      gs_nmse += *row.nmse;
      ++count;
    }
  }
  gs_nmse /= count;
  const std::string needle = "mtlrrc_gs,0.25,";
  const size_t pos = out.summary_csv.find(needle);
  REQUIRE(pos != std::string::npos);
  const size_t end = out.summary_csv.find(',', pos + needle.size());
  const double reported = std::stod(out.summary_csv.substr(pos + needle.size(),
                                                           end - pos - needle.size()));
  CHECK(reported == doctest::Approx(gs_nmse).epsilon(1e-12));
}

TEST_CASE("bench output is byte-identical across runs and worker counts") {
  RunConfig cfg = small_bench_config();
  cfg.workers = 1;
  const BenchOutput one = bench(cfg);
  cfg.workers = 4;
  const BenchOutput four = bench(cfg);
  CHECK(one.replicates_csv == four.replicates_csv);
  CHECK(one.summary_csv == four.summary_csv);
  const BenchOutput again = bench(cfg);
  CHECK(again.replicates_csv == four.replicates_csv);
}

TEST_CASE("mode parsing") {
  CHECK(run_mode_from_string("fit") == RunMode::Fit);
  CHECK(run_mode_from_string("simulate") == RunMode::Simulate);
  CHECK(run_mode_from_string("bench") == RunMode::Bench);
  CHECK_THROWS_AS(run_mode_from_string("train"), std::invalid_argument);
}
