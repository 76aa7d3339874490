#include "mtlrrc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtlrrc/stats.hpp"

namespace mtlrrc {

double Rng::uniform01() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are unreachable
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Rng::normal(double mean, double sd) { return mean + sd * normal_quantile(uniform01()); }

double sample_outlier_shift(Rng& rng, double sigma_o) {
  // Each mixture component is a normal centered at +-3 truncated at its
  // mean, so the conditional quantile is Phi^-1(0.5 + u/2).
  const bool negative = rng.uniform01() < 0.5;
  const double magnitude = 3.0 + sigma_o * normal_quantile(0.5 + 0.5 * rng.uniform01());
  return negative ? -magnitude : magnitude;
}

std::pair<MultiTaskData, GroundTruth> generate(const SimConfig& cfg) {
  if (cfg.n_tasks <= 0 || cfg.n_features <= 0 || cfg.n_clusters <= 0 || cfg.n_samples <= 0) {
    throw std::invalid_argument("simulate: sizes must be positive");
  }
  if (cfg.n_tasks % cfg.n_clusters != 0) {
    throw std::invalid_argument("simulate: n_tasks must be divisible by n_clusters");
  }
  if (!(cfg.kappa >= 0.0 && cfg.kappa <= 1.0)) {
    throw std::invalid_argument("simulate: kappa must be in [0, 1]");
  }
  if (cfg.sigma2 < 0.0 || cfg.sigma_o2 < 0.0) {
    throw std::invalid_argument("simulate: variances must be >= 0");
  }

  const int T = cfg.n_tasks;
  const int p = cfg.n_features;
  const int C = cfg.n_clusters;
  Rng rng(cfg.seed);

  // Feature-to-cluster assignment, uniform over clusters. Small p can
  // leave a cluster with no features, which makes its tasks' coefficient
  // rows identically zero; repair by moving one feature from the largest
  // cluster (deterministic, draw stream untouched).
  std::vector<int> feature_cluster(p);
  for (int j = 0; j < p; ++j) {
    feature_cluster[j] = std::min(C - 1, static_cast<int>(rng.uniform01() * C));
  }
  if (p >= C) {
    std::vector<int> count(C, 0);
    for (int j = 0; j < p; ++j) ++count[feature_cluster[j]];
    for (int c = 0; c < C; ++c) {
      if (count[c] > 0) continue;
      const int donor = static_cast<int>(
          std::max_element(count.begin(), count.end()) - count.begin());
      for (int j = 0; j < p; ++j) {
        if (feature_cluster[j] == donor) {
          feature_cluster[j] = c;
          --count[donor];
          ++count[c];
          break;
        }
      }
    }
  }

  GroundTruth truth;
  truth.cluster_of.resize(T);
  for (int m = 0; m < T; ++m) truth.cluster_of[m] = m / (T / C);
  truth.is_outlier.resize(T);
  for (int m = 0; m < T; ++m) truth.is_outlier[m] = rng.uniform01() < cfg.kappa;

  truth.u_true = Eigen::MatrixXd::Zero(C, p);
  for (int c = 0; c < C; ++c) {
    for (int j = 0; j < p; ++j) {
      if (feature_cluster[j] == c) truth.u_true(c, j) = rng.normal(0.0, 10.0);
    }
  }

  const double sigma_o = std::sqrt(cfg.sigma_o2);
  truth.W_true = Eigen::MatrixXd::Zero(T, p);
  truth.shift_true = Eigen::MatrixXd::Zero(T, p);
  for (int m = 0; m < T; ++m) {
    const int c = truth.cluster_of[m];
    if (cfg.regime == OutlierRegime::Structureless && truth.is_outlier[m]) {
      for (int j = 0; j < p; ++j) truth.W_true(m, j) = rng.uniform(-10.0, 10.0);
      continue;
    }
    for (int j = 0; j < p; ++j) {
      if (feature_cluster[j] != c) continue;
      truth.W_true(m, j) = truth.u_true(c, j) + rng.normal(0.0, 1.0);
      if (cfg.regime == OutlierRegime::CenterShift && truth.is_outlier[m]) {
        truth.shift_true(m, j) = sample_outlier_shift(rng, sigma_o);
        truth.W_true(m, j) += truth.shift_true(m, j);
      }
    }
  }

  MultiTaskData data;
  const double noise_sd = std::sqrt(cfg.sigma2);
  for (int m = 0; m < T; ++m) {
    TaskDataset task;
    task.family = Family::Gaussian;
    task.X.resize(cfg.n_samples, p);
    for (int i = 0; i < cfg.n_samples; ++i) {
      for (int j = 0; j < p; ++j) task.X(i, j) = rng.normal();
    }
    task.y = task.X * truth.W_true.row(m).transpose();
    for (int i = 0; i < cfg.n_samples; ++i) task.y[i] += rng.normal(0.0, noise_sd);
    data.tasks.push_back(std::move(task));
  }
  return {std::move(data), std::move(truth)};
}

}  // namespace mtlrrc
