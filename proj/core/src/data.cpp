#include "mtlrrc/data.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace mtlrrc {

const char* to_string(Family family) {
  return family == Family::Gaussian ? "gaussian" : "bernoulli";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "bernoulli") return Family::Bernoulli;
  throw std::invalid_argument("unknown family: " + name);
}

void MultiTaskData::validate() const {
  const int p = n_features();
  for (int m = 0; m < n_tasks(); ++m) {
    const auto& t = tasks[m];
    const std::string where = "task " + std::to_string(m + 1);
    if (t.p() != p) throw std::invalid_argument(where + ": feature count mismatch");
    if (t.X.rows() != t.y.size()) throw std::invalid_argument(where + ": X/y size mismatch");
    if (t.n() == 0) throw std::invalid_argument(where + ": empty task");
    if (t.family != family()) throw std::invalid_argument(where + ": mixed response families");
    if (!t.X.allFinite() || !t.y.allFinite()) {
      throw std::invalid_argument(where + ": non-finite values");
    }
    if (t.family == Family::Bernoulli) {
      for (int i = 0; i < t.n(); ++i) {
        if (t.y[i] != 0.0 && t.y[i] != 1.0) {
          throw std::invalid_argument(where + ": Bernoulli labels must be 0 or 1");
        }
      }
    }
  }
}

StandardizeStats standardize(MultiTaskData& data) {
  StandardizeStats stats;
  stats.x_mean.resize(data.n_tasks());
  stats.x_scale.resize(data.n_tasks());
  stats.y_mean.assign(data.n_tasks(), 0.0);
  for (int m = 0; m < data.n_tasks(); ++m) {
    auto& t = data.tasks[m];
    const double n = static_cast<double>(t.n());
    Eigen::VectorXd mean = t.X.colwise().mean();
    Eigen::VectorXd scale(t.p());
    for (int j = 0; j < t.p(); ++j) {
      const double var = (t.X.col(j).array() - mean[j]).square().sum() / n;
      if (!(var > 0.0)) {
        throw std::invalid_argument("task " + std::to_string(m + 1) + ", feature " +
                                    std::to_string(j + 1) + ": zero variance, cannot standardize");
      }
      scale[j] = std::sqrt(var);
    }
    stats.x_mean[m] = mean;
    stats.x_scale[m] = scale;
    if (t.family == Family::Gaussian) stats.y_mean[m] = t.y.mean();
  }
  apply_standardization(data, stats);
  return stats;
}

void apply_standardization(MultiTaskData& data, const StandardizeStats& stats) {
  if (static_cast<int>(stats.x_mean.size()) != data.n_tasks()) {
    throw std::invalid_argument("standardization stats cover a different task count");
  }
  for (int m = 0; m < data.n_tasks(); ++m) {
    auto& t = data.tasks[m];
    t.X = (t.X.rowwise() - stats.x_mean[m].transpose()).array().rowwise() /
          stats.x_scale[m].transpose().array();
    if (t.family == Family::Gaussian) t.y.array() -= stats.y_mean[m];
  }
}

Eigen::MatrixXd unstandardize_coefficients(const Eigen::MatrixXd& W,
                                           const StandardizeStats& stats) {
  if (static_cast<int>(stats.x_scale.size()) != W.rows()) {
    throw std::invalid_argument("standardization stats cover a different task count");
  }
  Eigen::MatrixXd out = W;
  for (int m = 0; m < W.rows(); ++m) {
    out.row(m) = W.row(m).array() / stats.x_scale[m].transpose().array();
  }
  return out;
}

namespace {

TaskDataset take_rows(const TaskDataset& t, const std::vector<int>& idx, int begin, int count) {
  TaskDataset out;
  out.family = t.family;
  out.X.resize(count, t.p());
  out.y.resize(count);
  for (int i = 0; i < count; ++i) {
    out.X.row(i) = t.X.row(idx[begin + i]);
    out.y[i] = t.y[idx[begin + i]];
  }
  return out;
}

void split_task(const TaskDataset& t, int m, const SplitCounts& c, std::uint64_t seed,
                SplitResult& out) {
  if (c.train < 0 || c.val < 0 || c.test < 0) {
    throw std::invalid_argument("split counts must be >= 0");
  }
  if (c.train + c.val + c.test > t.n()) {
    throw std::invalid_argument("split counts exceed task " + std::to_string(m + 1) +
                                " sample size");
  }
  std::vector<int> idx(t.n());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 engine(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(m) + 1u);
  // Fisher-Yates with an explicit draw so the permutation is stable across
  // standard library implementations.
  for (int i = t.n() - 1; i > 0; --i) {
    const auto j = static_cast<int>(engine() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[i], idx[j]);
  }
  out.train.tasks.push_back(take_rows(t, idx, 0, c.train));
  out.val.tasks.push_back(take_rows(t, idx, c.train, c.val));
  out.test.tasks.push_back(take_rows(t, idx, c.train + c.val, c.test));
}

}  // namespace

SplitResult split(const MultiTaskData& data, const SplitCounts& counts, std::uint64_t seed) {
  SplitResult out;
  for (int m = 0; m < data.n_tasks(); ++m) split_task(data.tasks[m], m, counts, seed, out);
  return out;
}

SplitResult split(const MultiTaskData& data, double train_ratio, double val_ratio,
                  double test_ratio, std::uint64_t seed) {
  if (train_ratio < 0 || val_ratio < 0 || test_ratio < 0 ||
      std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must be nonnegative and sum to 1");
  }
  SplitResult out;
  for (int m = 0; m < data.n_tasks(); ++m) {
    const int n = data.tasks[m].n();
    SplitCounts c;
    c.train = static_cast<int>(std::floor(train_ratio * n));
    c.val = static_cast<int>(std::floor(val_ratio * n));
    c.test = n - c.train - c.val;
    split_task(data.tasks[m], m, c, seed, out);
  }
  return out;
}

}  // namespace mtlrrc
