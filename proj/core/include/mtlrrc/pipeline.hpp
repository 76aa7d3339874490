#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "mtlrrc/data.hpp"
#include "mtlrrc/metrics.hpp"
#include "mtlrrc/simulate.hpp"
#include "mtlrrc/solver.hpp"
#include "mtlrrc/task_graph.hpp"

namespace mtlrrc {

enum class RunMode { Fit, Simulate, Bench };

RunMode run_mode_from_string(const std::string& name);

struct Grids {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<double> lambda3;

  // log-spaced defaults: lambda1 10^{-2..1} (7), lambda2 10^{-2..2} (9),
  // lambda3 10^{-1..2} (7)
  static Grids defaults();
};

std::vector<double> log_spaced(double exp_lo, double exp_hi, int count);

struct RunConfig {
  RunMode mode = RunMode::Fit;
  std::string data_dir;
  std::string out_dir;
  PenaltyFamily penalty = PenaltyFamily::GroupSCAD;
  double gamma = std::numeric_limits<double>::quiet_NaN();  // family default
  Grids grids = Grids::defaults();
  int k = 5;
  double nu = 1.0;
  std::uint64_t seed = 0;
  int replicates = 1;
  int workers = 1;
  SimConfig sim;
  // Fit mode splits by ratio; bench splits by counts (train n/4, val n/2,
  // rest test when left at -1).
  double train_ratio = 0.6, val_ratio = 0.2, test_ratio = 0.2;
  SplitCounts split_counts{-1, -1, -1};
  double stl_ridge = 1e-2;
  // Bench methods; subset of {mtlrrc_gl, mtlrrc_gs, mtlrrc_gm, mtlcvx, hmtlk}.
  std::vector<std::string> methods = {"mtlrrc_gl", "mtlrrc_gs", "mtlrrc_gm", "mtlcvx", "hmtlk"};
  FitOptions fit;
};

struct GridPointResult {
  HyperParams hp;
  bool frozen_outliers = false;
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
};

struct GridSearchResult {
  HyperParams best;
  FitResult best_fit;
  std::vector<GridPointResult> table;
  Eigen::MatrixXd stl_coefs;
  TaskGraph graph;
};

// Mean per-task validation loss: mean squared prediction error for Gaussian
// tasks, mean deviance for Bernoulli tasks.
double validation_loss(const MultiTaskData& val, const Eigen::VectorXd& w0,
                       const Eigen::MatrixXd& W);

// Fits every (lambda1, lambda2, lambda3) grid point on train, walking the
// lambda3 path from largest to smallest with warm-started centroids, and
// selects by validation loss (ties toward the lexicographically smallest
// parameters). train/val must already be standardized consistently.
// freeze_outliers pins O = 0 and collapses the lambda3 grid (the
// convex-clustering baseline).
GridSearchResult grid_search(const MultiTaskData& train, const MultiTaskData& val,
                             const RunConfig& cfg, PenaltyFamily family,
                             bool freeze_outliers = false);

struct BenchOutput {
  std::vector<MetricReport> rows;
  std::string replicates_csv;
  std::string summary_csv;
};

// Replication harness: generate, split, standardize, grid-search and score
// every configured method. Deterministic in cfg.seed regardless of worker
// count; files land in cfg.out_dir when set.
BenchOutput bench(const RunConfig& cfg);

// data-directory workflow: ingest, split, standardize, grid-search, write
// fit/diagnostic files to out_dir.
void run_fit(const RunConfig& cfg);

// Writes a generated dataset plus its ground truth to out_dir.
void run_simulate(const RunConfig& cfg);

}  // namespace mtlrrc
