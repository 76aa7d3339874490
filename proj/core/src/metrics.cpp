#include "mtlrrc/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mtlrrc/stats.hpp"

namespace mtlrrc {

std::vector<double> nmse_per_task(const std::vector<Eigen::VectorXd>& y_true,
                                  const std::vector<Eigen::MatrixXd>& X,
                                  const Eigen::MatrixXd& W_hat) {
  const auto T = y_true.size();
  if (X.size() != T || static_cast<size_t>(W_hat.rows()) != T) {
    throw std::invalid_argument("nmse: task count mismatch");
  }
  std::vector<double> out(T);
  for (size_t m = 0; m < T; ++m) {
    const auto n = y_true[m].size();
    if (X[m].rows() != n || X[m].cols() != W_hat.cols()) {
      throw std::invalid_argument("nmse: shape mismatch in task " + std::to_string(m + 1));
    }
    const double mean = y_true[m].mean();
    const double var = (y_true[m].array() - mean).square().sum() / n;
    if (!(var > 0.0)) {
      throw std::invalid_argument("nmse: task " + std::to_string(m + 1) +
                                  " has zero response variance");
    }
    out[m] = (y_true[m] - X[m] * W_hat.row(m).transpose()).squaredNorm() / (n * var);
  }
  return out;
}

double nmse(const std::vector<Eigen::VectorXd>& y_true, const std::vector<Eigen::MatrixXd>& X,
            const Eigen::MatrixXd& W_hat) {
  const std::vector<double> per_task = nmse_per_task(y_true, X, W_hat);
  return std::accumulate(per_task.begin(), per_task.end(), 0.0) / per_task.size();
}

double rmse(const Eigen::MatrixXd& W_true, const Eigen::MatrixXd& W_hat) {
  if (W_true.rows() != W_hat.rows() || W_true.cols() != W_hat.cols()) {
    throw std::invalid_argument("rmse: shape mismatch");
  }
  return std::sqrt((W_true - W_hat).squaredNorm()) / W_true.rows();
}

OutlierRates outlier_rates(const std::vector<char>& is_outlier_true,
                           const Eigen::MatrixXd& O_hat) {
  if (static_cast<Eigen::Index>(is_outlier_true.size()) != O_hat.rows()) {
    throw std::invalid_argument("outlier_rates: task count mismatch");
  }
  int true_pos = 0, false_pos = 0, n_true = 0, n_false = 0;
  for (Eigen::Index m = 0; m < O_hat.rows(); ++m) {
    const bool detected = O_hat.row(m).norm() > 0.0;
    if (is_outlier_true[m]) {
      ++n_true;
      true_pos += detected;
    } else {
      ++n_false;
      false_pos += detected;
    }
  }
  OutlierRates rates;
  if (n_true > 0) rates.tpr = static_cast<double>(true_pos) / n_true;
  if (n_false > 0) rates.fpr = static_cast<double>(false_pos) / n_false;
  return rates;
}

std::vector<int> hmtlk_detect(const Eigen::MatrixXd& stl_coefs, double level,
                              std::vector<std::string>* warnings) {
  const Eigen::Index T = stl_coefs.rows();
  const Eigen::Index p = stl_coefs.cols();
  if (T < 2) throw std::invalid_argument("hmtlk_detect: needs at least two tasks");
  const Eigen::RowVectorXd mean = stl_coefs.colwise().mean();
  const Eigen::MatrixXd centered = stl_coefs.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(T - 1);

  // Moore-Penrose inverse through the symmetric eigendecomposition; the
  // full-rank case reduces to the ordinary inverse.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(cov);
  const Eigen::VectorXd eigenvalues = eigen.eigenvalues();
  const double cutoff = std::max(eigenvalues.maxCoeff(), 0.0) * p * 1e-12;
  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(p);
  bool singular = T <= p;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (eigenvalues[j] > cutoff) {
      inverted[j] = 1.0 / eigenvalues[j];
    } else {
      singular = true;
    }
  }
  if (singular && warnings) {
    warnings->push_back("hmtlk: singular sample covariance, using pseudo-inverse");
  }
  const Eigen::MatrixXd precision =
      eigen.eigenvectors() * inverted.asDiagonal() * eigen.eigenvectors().transpose();

  const double threshold = chi_square_quantile(level, static_cast<double>(p));
  std::vector<int> detected;
  for (Eigen::Index m = 0; m < T; ++m) {
    const Eigen::VectorXd d = centered.row(m).transpose();
    const double h = d.dot(precision * d);
    if (h >= threshold) detected.push_back(static_cast<int>(m));
  }
  return detected;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: size mismatch");
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // Midranks handle ties exactly as half-counted pairs.
  std::vector<double> rank(scores.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = 0.5 * (i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) rank[order[t]] = mid;
    i = j + 1;
  }

  double positive_rank_sum = 0.0;
  long n_pos = 0, n_neg = 0;
  for (size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == 1) {
      ++n_pos;
      positive_rank_sum += rank[t];
    } else if (labels[t] == 0) {
      ++n_neg;
    } else {
      throw std::invalid_argument("auc: labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc: needs both positive and negative labels");
  }
  return (positive_rank_sum - 0.5 * n_pos * (n_pos + 1.0)) / (static_cast<double>(n_pos) * n_neg);
}

}  // namespace mtlrrc
