#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mtlrrc/penalty.hpp"
#include "test_support.hpp"

using namespace mtlrrc;
using test_support::grid_min;
using test_support::random_orthogonal;
using test_support::random_vector;

namespace {

Eigen::Vector2d vec2(double a, double b) { return Eigen::Vector2d(a, b); }

// Scalar group penalties from their textbook definitions; the oracle for
// the thresholding functions is numeric minimization of
// q(t) = (t - r)^2 / 2 + P(t) along the ray of the input.
double penalty_oracle(double t, const PenaltySpec& spec) {
  const double lambda = spec.lambda;
  const double gamma = spec.gamma;
  switch (spec.family) {
    case PenaltyFamily::GroupLasso:
      return lambda * t;
    case PenaltyFamily::GroupSCAD:
      if (t <= lambda) return lambda * t;
      if (t <= gamma * lambda) {
        return (gamma * lambda * t - 0.5 * (t * t + lambda * lambda)) / (gamma - 1.0);
      }
      return 0.5 * (gamma + 1.0) * lambda * lambda;
    case PenaltyFamily::GroupMCP:
      if (t <= gamma * lambda) return lambda * t - t * t / (2.0 * gamma);
      return 0.5 * gamma * lambda * lambda;
    default:
      throw std::logic_error("no closed-form penalty");
  }
}

double prox_oracle_radius(double r, const PenaltySpec& spec) {
  const double gamma_factor = spec.family == PenaltyFamily::GroupLasso ? 3.0 : spec.gamma;
  const double hi = std::max(r, gamma_factor * spec.lambda) + 5.0 * spec.lambda + 1.0;
  return grid_min([&](double t) { return 0.5 * (t - r) * (t - r) + penalty_oracle(t, spec); },
                  0.0, hi);
}

// Standard-normalization Tukey loss (saturates at lambda^2/6); its
// derivative characterizes the thresholding function independently of the
// implementation.
double tukey_reference_threshold(double r, double lambda) {
  const auto loss = [lambda](double s) {
    if (s >= lambda) return lambda * lambda / 6.0;
    const double w = 1.0 - (s / lambda) * (s / lambda);
    return lambda * lambda / 6.0 * (1.0 - w * w * w);
  };
  const double h = 1e-6;
  return r - (loss(r + h) - loss(r - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("group soft threshold matches the closed form") {
  CHECK(group_soft_threshold(vec2(3, 4), 5.0).isZero(0.0));
  CHECK(group_soft_threshold(vec2(3, 4), 0.0).isApprox(vec2(3, 4)));
  // frozen from the numeric prox oracle of the group lasso penalty
  const Eigen::VectorXd shrunk = group_soft_threshold(vec2(3, 4), 2.5);
  CHECK(shrunk(0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(shrunk(1) == doctest::Approx(2.0).epsilon(1e-12));
  const double oracle = prox_oracle_radius(5.0, PenaltySpec::group_lasso(2.5));
  CHECK(shrunk.norm() == doctest::Approx(oracle).epsilon(1e-7));

  CHECK(group_soft_threshold(Eigen::VectorXd::Zero(3), 1.0).isZero(0.0));
  CHECK_THROWS_AS(group_soft_threshold(vec2(3, 4), -1.0), std::invalid_argument);
  Eigen::VectorXd bad = vec2(1, std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(group_soft_threshold(bad, 1.0), std::invalid_argument);
}

TEST_CASE("family thresholding examples") {
  const PenaltySpec scad = PenaltySpec::group_scad(1.0, 3.7);
  CHECK(threshold(vec2(5, 0), scad).isApprox(vec2(5, 0)));  // beyond gamma*lambda
  const Eigen::VectorXd mid = threshold(vec2(3, 0), scad);
  CHECK(mid(0) == doctest::Approx(2.588235294117647).epsilon(1e-12));
  CHECK(mid(1) == 0.0);
  CHECK(mid(0) == doctest::Approx(prox_oracle_radius(3.0, scad)).epsilon(1e-7));

  const PenaltySpec mcp = PenaltySpec::group_mcp(1.0, 3.0);
  const Eigen::VectorXd mcp_mid = threshold(vec2(1.5, 0), mcp);
  CHECK(mcp_mid(0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(mcp_mid(0) == doctest::Approx(prox_oracle_radius(1.5, mcp)).epsilon(1e-7));

  const PenaltySpec tukey = PenaltySpec::multi_tukey(3.0);
  CHECK(threshold(vec2(4, 0), tukey).isApprox(vec2(4, 0)));  // outside the radius
}

TEST_CASE("psi is the gap to the threshold") {
  const Eigen::VectorXd huber_score = psi(vec2(3, 4), PenaltySpec::group_lasso(2.5));
  CHECK(huber_score(0) == doctest::Approx(1.5));
  CHECK(huber_score(1) == doctest::Approx(2.0));
  CHECK(psi(Eigen::VectorXd::Zero(4), PenaltySpec::group_scad(1.0, 3.7)).isZero(0.0));
  CHECK(psi(vec2(5, 0), PenaltySpec::group_scad(1.0, 3.7)).isZero(0.0));
}

TEST_CASE("robust loss values") {
  CHECK(robust_loss(vec2(1, 1), PenaltySpec::group_lasso(3.0)) == doctest::Approx(1.0));
  Eigen::VectorXd far = vec2(10, 0);
  CHECK(robust_loss(far, PenaltySpec::group_scad(1.0, 3.7)) == doctest::Approx(2.35));
  CHECK(robust_loss(vec2(3, 4), PenaltySpec::multi_tukey(2.0)) == doctest::Approx(1.0));
  // Huber switches from quadratic to linear at the radius
  CHECK(robust_loss(vec2(0, 5), PenaltySpec::group_lasso(2.0)) ==
        doctest::Approx(2.0 * 5.0 - 2.0));
}

TEST_CASE("prox consistency on a radius grid") {
  std::mt19937_64 rng(7);
  const std::vector<PenaltySpec> specs = {
      PenaltySpec::group_lasso(0.8),
      PenaltySpec::group_scad(0.9, 3.7),
      PenaltySpec::group_scad(1.3, 2.4),
      PenaltySpec::group_mcp(0.7, 3.0),
      PenaltySpec::group_mcp(1.1, 1.6),
  };
  for (const auto& spec : specs) {
    const double gamma_factor = spec.family == PenaltyFamily::GroupLasso ? 3.0 : spec.gamma;
    for (int step = 0; step <= 20; ++step) {
      const double r = 0.1 * step * gamma_factor * spec.lambda;
      Eigen::VectorXd dir = random_vector(rng, 3);
      dir.normalize();
      const Eigen::VectorXd out = threshold(r * dir, spec);
      const double oracle = prox_oracle_radius(r, spec);
      CHECK((out - oracle * dir).norm() <= 1e-6);
    }
  }
}

TEST_CASE("score relation: finite differences of the loss recover psi") {
  std::mt19937_64 rng(11);
  const std::vector<PenaltySpec> specs = {
      PenaltySpec::group_lasso(1.2),
      PenaltySpec::group_scad(1.0, 3.7),
      PenaltySpec::group_mcp(0.9, 3.0),
  };
  const double h = 1e-5;
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 25; ++trial) {
      Eigen::VectorXd z = random_vector(rng, 3, 2.0 * spec.lambda);
      // keep clear of the regime boundaries where the loss has kinks
      const double r = z.norm();
      bool near_boundary = r < 1e-2;
      for (double b : {spec.lambda, 2.0 * spec.lambda, spec.gamma * spec.lambda}) {
        if (std::isfinite(b) && std::abs(r - b) < 1e-2) near_boundary = true;
      }
      if (near_boundary) continue;
      Eigen::VectorXd grad(z.size());
      for (int j = 0; j < z.size(); ++j) {
        Eigen::VectorXd hi = z, lo = z;
        hi[j] += h;
        lo[j] -= h;
        grad[j] = (robust_loss(hi, spec) - robust_loss(lo, spec)) / (2.0 * h);
      }
      CHECK((grad - psi(z, spec)).lpNorm<Eigen::Infinity>() <= 1e-4);
    }
  }
  // The Tukey loss saturates at 1, which rescales its gradient relative to
  // the score by 6 / lambda^2.
  const PenaltySpec tukey = PenaltySpec::multi_tukey(2.0);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd z = random_vector(rng, 3, 0.8);
    const double r = z.norm();
    if (r < 1e-2 || std::abs(r - tukey.lambda) < 1e-2) continue;
    Eigen::VectorXd grad(z.size());
    for (int j = 0; j < z.size(); ++j) {
      Eigen::VectorXd hi = z, lo = z;
      hi[j] += h;
      lo[j] -= h;
      grad[j] = (robust_loss(hi, tukey) - robust_loss(lo, tukey)) / (2.0 * h);
    }
    const Eigen::VectorXd expected = 6.0 / (tukey.lambda * tukey.lambda) * psi(z, tukey);
    CHECK((grad - expected).lpNorm<Eigen::Infinity>() <= 1e-4);
  }
}

TEST_CASE("rotational equivariance and shrinkage") {
  std::mt19937_64 rng(13);
  const std::vector<PenaltySpec> specs = {
      PenaltySpec::group_lasso(1.0),
      PenaltySpec::group_scad(1.0, 3.7),
      PenaltySpec::group_mcp(1.0, 3.0),
      PenaltySpec::multi_tukey(1.5),
  };
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd z = random_vector(rng, 4, 1.5);
      const Eigen::MatrixXd q = random_orthogonal(rng, 4);
      CHECK((threshold(q * z, spec) - q * threshold(z, spec)).norm() <= 1e-12);
      CHECK(threshold(z, spec).norm() <= z.norm() + 1e-14);
    }
  }
}

TEST_CASE("SCAD and MCP are exactly unbiased beyond gamma*lambda") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd z = random_vector(rng, 3);
    z *= (3.7 + 0.5 + trial) / z.norm();  // norm > gamma * lambda
    CHECK(threshold(z, PenaltySpec::group_scad(1.0, 3.7)) == z);
    CHECK(threshold(z, PenaltySpec::group_mcp(1.0, 3.0)) == z);
  }
}

TEST_CASE("continuity at regime boundaries") {
  const double eps = 1e-9;
  const auto jump = [eps](const PenaltySpec& spec, double r) {
    const Eigen::VectorXd lo = threshold(vec2(r - eps, 0), spec);
    const Eigen::VectorXd hi = threshold(vec2(r + eps, 0), spec);
    return (hi - lo).norm();
  };
  const PenaltySpec scad = PenaltySpec::group_scad(1.0, 3.7);
  for (double r : {1.0, 2.0, 3.7}) CHECK(jump(scad, r) <= 1e-7);
  const PenaltySpec mcp = PenaltySpec::group_mcp(1.0, 3.0);
  for (double r : {1.0, 3.0}) CHECK(jump(mcp, r) <= 1e-7);
  const PenaltySpec tukey = PenaltySpec::multi_tukey(2.0);
  CHECK(jump(tukey, 2.0) <= 1e-7);

  const auto loss_jump = [eps](const PenaltySpec& spec, double r) {
    return std::abs(robust_loss(vec2(r + eps, 0), spec) - robust_loss(vec2(r - eps, 0), spec));
  };
  for (double r : {1.0, 2.0, 3.7}) CHECK(loss_jump(scad, r) <= 1e-7);
  for (double r : {1.0, 3.0}) CHECK(loss_jump(mcp, r) <= 1e-7);
  CHECK(loss_jump(tukey, 2.0) <= 1e-7);
}

TEST_CASE("robust loss is the Moreau envelope of the penalty") {
  std::mt19937_64 rng(19);
  const std::vector<PenaltySpec> specs = {
      PenaltySpec::group_lasso(1.1),
      PenaltySpec::group_scad(0.8, 3.7),
      PenaltySpec::group_mcp(1.2, 3.0),
  };
  for (const auto& spec : specs) {
    for (int step = 1; step <= 12; ++step) {
      const double r = 0.4 * step * spec.lambda;
      const double hi = r + 6.0 * spec.lambda + 1.0;
      const double envelope = [&] {
        double best = 1e300;
        for (int i = 0; i <= 20000; ++i) {
          const double t = hi * i / 20000;
          best = std::min(best, 0.5 * (t - r) * (t - r) + penalty_oracle(t, spec));
        }
        return best;
      }();
      CHECK(robust_loss_radius(r, spec) == doctest::Approx(envelope).epsilon(1e-6));
      // and penalty_value agrees with the textbook forms
      CHECK(penalty_value_radius(r, spec) == doctest::Approx(penalty_oracle(r, spec)));
    }
  }
}

TEST_CASE("Tukey threshold matches the derivative of the standard loss") {
  const PenaltySpec tukey = PenaltySpec::multi_tukey(2.5);
  for (int i = 1; i < 40; ++i) {
    const double r = 0.08 * i * tukey.lambda;
    const double reference = tukey_reference_threshold(r, tukey.lambda);
    CHECK(threshold_radius(r, tukey) == doctest::Approx(reference).epsilon(1e-6));
  }
  // implicit penalty: constant beyond the radius, zero at zero, and the
  // envelope identity holds at the threshold point
  CHECK(penalty_value_radius(0.0, tukey) == doctest::Approx(0.0));
  CHECK(penalty_value_radius(5.0, tukey) ==
        doctest::Approx(tukey.lambda * tukey.lambda / 6.0));
  for (int i = 1; i <= 10; ++i) {
    const double r = 0.1 * i * tukey.lambda;
    const double t = threshold_radius(r, tukey);
    const double envelope =
        tukey.lambda * tukey.lambda / 6.0 * robust_loss_radius(r, tukey);
    CHECK(0.5 * (r - t) * (r - t) + penalty_value_radius(t, tukey) ==
          doctest::Approx(envelope).epsilon(1e-9));
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(PenaltySpec::group_scad(1.0, 2.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec::group_mcp(1.0, 1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PenaltySpec::group_lasso(-0.5).validate(), std::invalid_argument);
  CHECK(PenaltySpec::group_lasso(1.0).validate().empty());
  PenaltySpec tukey = PenaltySpec::multi_tukey(1.0);
  CHECK(tukey.validate().empty());
  tukey.gamma = 3.0;  // set but unused
  CHECK(tukey.validate().size() == 1);
  CHECK_THROWS_AS(threshold(vec2(1, 1), PenaltySpec::group_scad(1.0, 1.5)),
                  std::invalid_argument);
}
