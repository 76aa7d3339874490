#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace mtlrrc {

struct MetricReport {
  std::string method;
  double kappa = 0.0;
  int replicate = 0;
  std::optional<double> nmse;
  std::optional<double> rmse;
  std::optional<double> tpr;  // absent when no true outliers exist
  std::optional<double> fpr;  // absent when every task is a true outlier
  std::optional<double> auc;
  std::vector<double> per_task_nmse;
};

// (1/T) sum_m ||y*_m - X_m w_m||^2 / (n_m Var(y*_m)) with the population
// (divide-by-n) variance. Throws on a zero-variance task, naming it.
double nmse(const std::vector<Eigen::VectorXd>& y_true, const std::vector<Eigen::MatrixXd>& X,
            const Eigen::MatrixXd& W_hat);
std::vector<double> nmse_per_task(const std::vector<Eigen::VectorXd>& y_true,
                                  const std::vector<Eigen::MatrixXd>& X,
                                  const Eigen::MatrixXd& W_hat);

// (1/T) sqrt(sum_m ||w*_m - w_m||^2); the 1/T factor sits outside the root.
double rmse(const Eigen::MatrixXd& W_true, const Eigen::MatrixXd& W_hat);

struct OutlierRates {
  std::optional<double> tpr;
  std::optional<double> fpr;
};

// Detection is structural: a task is flagged iff its row of O_hat has any
// nonzero entry (the thresholding functions produce exact zeros).
OutlierRates outlier_rates(const std::vector<char>& is_outlier_true,
                           const Eigen::MatrixXd& O_hat);

// Hotelling-style screen on single-task coefficients: flags tasks whose
// Mahalanobis distance from the mean row exceeds the chi-square quantile.
// Falls back to a pseudo-inverse (with a warning appended when a sink is
// given) if the sample covariance is singular.
std::vector<int> hmtlk_detect(const Eigen::MatrixXd& stl_coefs, double level = 0.95,
                              std::vector<std::string>* warnings = nullptr);

// Mann-Whitney AUC; ties count one half.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace mtlrrc
