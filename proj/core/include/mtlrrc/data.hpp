#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace mtlrrc {

enum class Family { Gaussian, Bernoulli };

const char* to_string(Family family);
Family family_from_string(const std::string& name);

struct TaskDataset {
  Eigen::MatrixXd X;  // n x p design matrix
  Eigen::VectorXd y;  // n responses; {0,1} under Bernoulli
  Family family = Family::Gaussian;

  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

// T task datasets sharing one feature schema and one response family.
struct MultiTaskData {
  std::vector<TaskDataset> tasks;

  int n_tasks() const { return static_cast<int>(tasks.size()); }
  int n_features() const { return tasks.empty() ? 0 : tasks.front().p(); }
  Family family() const { return tasks.empty() ? Family::Gaussian : tasks.front().family; }

  // Shape/label consistency; throws std::invalid_argument with the task
  // index on the first violation.
  void validate() const;
};

// Per-task standardization statistics, kept so that fitted coefficients can
// be mapped back to the original scale.
struct StandardizeStats {
  std::vector<Eigen::VectorXd> x_mean;
  std::vector<Eigen::VectorXd> x_scale;  // population standard deviations
  std::vector<double> y_mean;            // 0 for Bernoulli tasks
};

// Centers and scales every feature column to mean 0 / variance 1
// (population convention) and centers Gaussian responses, per task.
// Throws on zero-variance columns, naming task and column.
StandardizeStats standardize(MultiTaskData& data);

// Applies training statistics to another split of the same tasks.
void apply_standardization(MultiTaskData& data, const StandardizeStats& stats);

// Maps coefficients estimated on standardized data back to the original
// scale: w_j -> w_j / scale_j, one row per task.
Eigen::MatrixXd unstandardize_coefficients(const Eigen::MatrixXd& W, const StandardizeStats& stats);

struct SplitCounts {
  int train = 0;
  int val = 0;
  int test = 0;
};

struct SplitResult {
  MultiTaskData train;
  MultiTaskData val;
  MultiTaskData test;
};

// Disjoint per-task sample splits, deterministic in the seed. Counts apply
// to every task and must not exceed any task's sample size.
SplitResult split(const MultiTaskData& data, const SplitCounts& counts, std::uint64_t seed);

// Ratio form; ratios must be positive or zero and sum to 1. Train and
// validation sizes are floored, the remainder goes to test.
SplitResult split(const MultiTaskData& data, double train_ratio, double val_ratio,
                  double test_ratio, std::uint64_t seed);

}  // namespace mtlrrc
