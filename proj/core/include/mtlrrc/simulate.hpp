#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "mtlrrc/data.hpp"

namespace mtlrrc {

// Outlier regimes: CenterShift tasks keep their cluster center and gain a
// large shift on the cluster's features; Structureless tasks replace the
// whole coefficient vector with uniform noise.
enum class OutlierRegime { CenterShift = 1, Structureless = 2 };

struct SimConfig {
  int n_tasks = 150;
  int n_features = 100;
  int n_clusters = 3;  // must divide n_tasks
  int n_samples = 200;
  double sigma2 = 5.0;    // response noise variance
  double kappa = 0.0;     // per-task outlier probability
  double sigma_o2 = 1.0;  // truncated-normal variance of the shift mixture
  OutlierRegime regime = OutlierRegime::CenterShift;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  Eigen::MatrixXd W_true;       // T x p
  std::vector<int> cluster_of;  // 0-based nominal cluster per task
  std::vector<char> is_outlier;
  Eigen::MatrixXd u_true;      // C x p cluster centers
  Eigen::MatrixXd shift_true;  // T x p center-shift draws; zero off outlier rows
};

// Deterministic generator: uniforms straight off a mt19937_64 stream,
// everything else via inverse-CDF transforms, so outputs are reproducible
// bit for bit on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform01();  // strictly inside (0, 1)
  double uniform(double a, double b);
  double normal(double mean = 0.0, double sd = 1.0);

 private:
  std::mt19937_64 engine_;
};

// One draw from the shift mixture: equal-weight truncated normals on
// (-inf, -3] and [3, inf) centered at -3 / +3 with the given sd.
double sample_outlier_shift(Rng& rng, double sigma_o);

// Gaussian multi-task data y = X w* + eps with cluster-structured true
// coefficients. Deterministic in cfg.seed.
std::pair<MultiTaskData, GroundTruth> generate(const SimConfig& cfg);

}  // namespace mtlrrc
