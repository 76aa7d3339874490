#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlrrc/metrics.hpp"
#include "mtlrrc/stats.hpp"
#include "test_support.hpp"

using namespace mtlrrc;
using test_support::random_matrix;
using test_support::random_vector;

namespace {

double naive_nmse(const std::vector<Eigen::VectorXd>& y, const std::vector<Eigen::MatrixXd>& x,
                  const Eigen::MatrixXd& w) {
  double total = 0.0;
  for (size_t m = 0; m < y.size(); ++m) {
    const auto n = y[m].size();
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += y[m][i];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (y[m][i] - mean) * (y[m][i] - mean);
    var /= n;
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      double pred = 0.0;
      for (int j = 0; j < w.cols(); ++j) pred += x[m](i, j) * w(m, j);
      err += (y[m][i] - pred) * (y[m][i] - pred);
    }
    total += err / (n * var);
  }
  return total / y.size();
}

double naive_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  long pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("nmse") {
  std::mt19937_64 rng(2);
  const int T = 3, n = 12, p = 4;
  std::vector<Eigen::MatrixXd> x;
  std::vector<Eigen::VectorXd> y_exact, y_centered;
  Eigen::MatrixXd w = random_matrix(rng, T, p);
  for (int m = 0; m < T; ++m) {
    x.push_back(random_matrix(rng, n, p));
    y_exact.push_back(x.back() * w.row(m).transpose());
    Eigen::VectorXd c = random_vector(rng, n);
    y_centered.push_back(c.array() - c.mean());
  }
  CHECK(nmse(y_exact, x, w) == doctest::Approx(0.0));
  CHECK(nmse(y_centered, x, Eigen::MatrixXd::Zero(T, p)) == doctest::Approx(1.0));

  const Eigen::MatrixXd w_other = random_matrix(rng, T, p);
  CHECK(nmse(y_exact, x, w_other) ==
        doctest::Approx(naive_nmse(y_exact, x, w_other)).epsilon(1e-12));

  std::vector<Eigen::VectorXd> flat = y_exact;
  flat[1].setConstant(2.0);
  CHECK_THROWS_WITH_AS(nmse(flat, x, w), doctest::Contains("task 2"), std::invalid_argument);
}

TEST_CASE("rmse") {
  Eigen::MatrixXd w(1, 2);
  w << 3, 4;
  CHECK(rmse(Eigen::MatrixXd::Zero(1, 2), w) == doctest::Approx(5.0));
  CHECK(rmse(w, w) == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  const Eigen::MatrixXd a = random_matrix(rng, 5, 3);
  const Eigen::MatrixXd b = random_matrix(rng, 5, 3);
  std::vector<int> perm = {3, 0, 4, 1, 2};
  Eigen::MatrixXd ap(5, 3), bp(5, 3);
  for (int i = 0; i < 5; ++i) {
    ap.row(i) = a.row(perm[i]);
    bp.row(i) = b.row(perm[i]);
  }
  CHECK(rmse(a, b) == doctest::Approx(rmse(ap, bp)).epsilon(1e-14));
}

TEST_CASE("outlier rates") {
  std::vector<char> truth = {1, 0, 1, 0, 0};
  CHECK_FALSE(outlier_rates(truth, Eigen::MatrixXd::Zero(5, 2)).tpr == std::nullopt);
  CHECK(*outlier_rates(truth, Eigen::MatrixXd::Zero(5, 2)).tpr == 0.0);
  CHECK(*outlier_rates(truth, Eigen::MatrixXd::Zero(5, 2)).fpr == 0.0);

  Eigen::MatrixXd perfect = Eigen::MatrixXd::Zero(5, 2);
  perfect(0, 1) = 0.5;
  perfect(2, 0) = -1.0;
  const OutlierRates rates = outlier_rates(truth, perfect);
  CHECK(*rates.tpr == 1.0);
  CHECK(*rates.fpr == 0.0);

  // no true outliers -> TPR absent
  std::vector<char> none(5, 0);
  CHECK(outlier_rates(none, perfect).tpr == std::nullopt);
  CHECK(*outlier_rates(none, perfect).fpr == doctest::Approx(0.4));

  // counting oracle on random masks
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<char> mask(8);
    Eigen::MatrixXd o = Eigen::MatrixXd::Zero(8, 3);
    int tp = 0, fp = 0, nt = 0, nf = 0;
    for (int m = 0; m < 8; ++m) {
      mask[m] = rng() % 2;
      const bool detect = rng() % 2;
      if (detect) o(m, rng() % 3) = 1.0;
      (mask[m] ? nt : nf) += 1;
      if (detect && mask[m]) ++tp;
      if (detect && !mask[m]) ++fp;
    }
    const OutlierRates r = outlier_rates(mask, o);
    if (nt > 0) CHECK(*r.tpr == doctest::Approx(static_cast<double>(tp) / nt));
    if (nf > 0) CHECK(*r.fpr == doctest::Approx(static_cast<double>(fp) / nf));
  }
}

TEST_CASE("hotelling-style detector") {
  // identical rows: singular covariance, pseudo-inverse path, nothing flagged
  std::vector<std::string> warnings;
  CHECK(hmtlk_detect(Eigen::MatrixXd::Ones(6, 2), 0.95, &warnings).empty());
  CHECK_FALSE(warnings.empty());

  std::mt19937_64 rng(7);
  Eigen::MatrixXd coefs = random_matrix(rng, 50, 2);
  coefs.row(17).array() += 100.0;
  const std::vector<int> detected = hmtlk_detect(coefs);
  CHECK(std::count(detected.begin(), detected.end(), 17) == 1);

  // direct statistic computation must agree with the detection set
  const Eigen::RowVectorXd mean = coefs.colwise().mean();
  const Eigen::MatrixXd centered = coefs.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / 49.0;
  const Eigen::MatrixXd precision = cov.inverse();
  const double threshold = chi_square_quantile(0.95, 2);
  std::vector<int> expected;
  for (int m = 0; m < 50; ++m) {
    const Eigen::VectorXd d = centered.row(m).transpose();
    if (d.dot(precision * d) >= threshold) expected.push_back(m);
  }
  CHECK(detected == expected);

  // Mahalanobis invariance under a common affine map
  const Eigen::MatrixXd a = random_matrix(rng, 2, 2) + 3.0 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::RowVectorXd b = random_vector(rng, 2).transpose();
  Eigen::MatrixXd mapped = coefs * a.transpose();
  mapped.rowwise() += b;
  CHECK(hmtlk_detect(mapped) == detected);
}

TEST_CASE("auc") {
  CHECK(auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == doctest::Approx(1.0));
  CHECK(auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == doctest::Approx(0.5));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> scores(30);
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) {
      scores[i] = std::round(unif(rng) * 10.0) / 10.0;  // coarse grid forces ties
      labels[i] = rng() % 2;
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0) labels[0] = 1;
    if (std::count(labels.begin(), labels.end(), 0) == 0) labels[1] = 0;
    CHECK(auc(scores, labels) == doctest::Approx(naive_auc(scores, labels)).epsilon(1e-12));
  }
}
