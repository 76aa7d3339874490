#include "mtlrrc/penalty.hpp"

#include <cmath>
#include <stdexcept>

namespace mtlrrc {

const char* to_string(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::GroupLasso: return "group_lasso";
    case PenaltyFamily::GroupSCAD: return "group_scad";
    case PenaltyFamily::GroupMCP: return "group_mcp";
    case PenaltyFamily::MultiTukey: return "multi_tukey";
  }
  return "unknown";
}

PenaltyFamily penalty_family_from_string(const std::string& name) {
  if (name == "group_lasso" || name == "gl") return PenaltyFamily::GroupLasso;
  if (name == "group_scad" || name == "gs") return PenaltyFamily::GroupSCAD;
  if (name == "group_mcp" || name == "gm") return PenaltyFamily::GroupMCP;
  if (name == "multi_tukey" || name == "tukey") return PenaltyFamily::MultiTukey;
  throw std::invalid_argument("unknown penalty family: " + name);
}

double PenaltySpec::default_gamma(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::GroupSCAD: return 3.7;
    case PenaltyFamily::GroupMCP: return 3.0;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

PenaltySpec PenaltySpec::group_lasso(double lambda) {
  return {PenaltyFamily::GroupLasso, lambda, std::numeric_limits<double>::quiet_NaN()};
}
PenaltySpec PenaltySpec::group_scad(double lambda, double gamma) {
  return {PenaltyFamily::GroupSCAD, lambda, gamma};
}
PenaltySpec PenaltySpec::group_mcp(double lambda, double gamma) {
  return {PenaltyFamily::GroupMCP, lambda, gamma};
}
PenaltySpec PenaltySpec::multi_tukey(double lambda) {
  return {PenaltyFamily::MultiTukey, lambda, std::numeric_limits<double>::quiet_NaN()};
}

PenaltySpec PenaltySpec::with_lambda(double new_lambda) const {
  PenaltySpec out = *this;
  out.lambda = new_lambda;
  return out;
}

std::vector<std::string> PenaltySpec::validate() const {
  std::vector<std::string> warnings;
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("penalty lambda must be finite and >= 0");
  }
  switch (family) {
    case PenaltyFamily::GroupLasso:
      break;
    case PenaltyFamily::GroupSCAD:
      if (!(gamma > 2.0)) {
        throw std::invalid_argument("group SCAD requires gamma > 2");
      }
      break;
    case PenaltyFamily::GroupMCP:
      if (!(gamma > 1.0)) {
        throw std::invalid_argument("group MCP requires gamma > 1");
      }
      break;
    case PenaltyFamily::MultiTukey:
      if (std::isfinite(gamma)) {
        warnings.push_back("multi_tukey takes no gamma; value ignored");
      }
      break;
  }
  return warnings;
}

namespace {

double soft_radius(double r, double lambda) {
  return r > lambda ? r - lambda : 0.0;
}

void check_finite(const Eigen::VectorXd& z) {
  if (!z.allFinite()) {
    throw std::invalid_argument("thresholding input has non-finite entries");
  }
}

// Scale z to the target radius; z = 0 maps to 0.
Eigen::VectorXd rescale(const Eigen::VectorXd& z, double r, double target) {
  if (target == r) return z;
  if (r == 0.0) return Eigen::VectorXd::Zero(z.size());
  return (target / r) * z;
}

}  // namespace

double threshold_radius(double r, const PenaltySpec& spec) {
  spec.validate();
  const double lambda = spec.lambda;
  const double gamma = spec.gamma;
  switch (spec.family) {
    case PenaltyFamily::GroupLasso:
      return soft_radius(r, lambda);
    case PenaltyFamily::GroupSCAD:
      if (r <= 2.0 * lambda) return soft_radius(r, lambda);
      if (r <= gamma * lambda) {
        return (gamma - 1.0) / (gamma - 2.0) * soft_radius(r, gamma * lambda / (gamma - 1.0));
      }
      return r;
    case PenaltyFamily::GroupMCP:
      if (r <= gamma * lambda) return gamma / (gamma - 1.0) * soft_radius(r, lambda);
      return r;
    case PenaltyFamily::MultiTukey: {
      if (lambda == 0.0) return r;
      if (r > lambda) return r;
      const double w = 1.0 - (r / lambda) * (r / lambda);
      return r - r * w * w;
    }
  }
  return r;
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& z, double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw std::invalid_argument("soft threshold lambda must be finite and >= 0");
  }
  check_finite(z);
  const double r = z.norm();
  return rescale(z, r, soft_radius(r, lambda));
}

Eigen::VectorXd threshold(const Eigen::VectorXd& z, const PenaltySpec& spec) {
  check_finite(z);
  const double r = z.norm();
  return rescale(z, r, threshold_radius(r, spec));
}

Eigen::VectorXd psi(const Eigen::VectorXd& z, const PenaltySpec& spec) {
  return z - threshold(z, spec);
}

double robust_loss_radius(double r, const PenaltySpec& spec) {
  spec.validate();
  const double lambda = spec.lambda;
  const double gamma = spec.gamma;
  switch (spec.family) {
    case PenaltyFamily::GroupLasso:
      // multivariate Huber
      if (r <= lambda) return 0.5 * r * r;
      return lambda * r - 0.5 * lambda * lambda;
    case PenaltyFamily::GroupSCAD:
      if (r <= lambda) return 0.5 * r * r;
      if (r < 2.0 * lambda) return lambda * r - 0.5 * lambda * lambda;
      if (r <= gamma * lambda) {
        return gamma * lambda / (gamma - 2.0) * r - r * r / (2.0 * (gamma - 2.0)) -
               (gamma + 2.0) / (2.0 * (gamma - 2.0)) * lambda * lambda;
      }
      return 0.5 * (gamma + 1.0) * lambda * lambda;
    case PenaltyFamily::GroupMCP:
      if (r <= lambda) return 0.5 * r * r;
      if (r <= gamma * lambda) {
        return gamma * lambda / (gamma - 1.0) * r - r * r / (2.0 * (gamma - 1.0)) -
               gamma * lambda * lambda / (2.0 * (gamma - 1.0));
      }
      return 0.5 * gamma * lambda * lambda;
    case PenaltyFamily::MultiTukey: {
      if (lambda == 0.0) return r > 0.0 ? 1.0 : 0.0;
      if (r > lambda) return 1.0;
      const double w = 1.0 - (r / lambda) * (r / lambda);
      return 1.0 - w * w * w;
    }
  }
  return 0.0;
}

double robust_loss(const Eigen::VectorXd& z, const PenaltySpec& spec) {
  check_finite(z);
  return robust_loss_radius(z.norm(), spec);
}

double penalty_value_radius(double r, const PenaltySpec& spec) {
  spec.validate();
  const double lambda = spec.lambda;
  const double gamma = spec.gamma;
  switch (spec.family) {
    case PenaltyFamily::GroupLasso:
      return lambda * r;
    case PenaltyFamily::GroupSCAD:
      if (r <= lambda) return lambda * r;
      if (r <= gamma * lambda) {
        return (gamma * lambda * r - 0.5 * (r * r + lambda * lambda)) / (gamma - 1.0);
      }
      return 0.5 * lambda * lambda * (gamma + 1.0);
    case PenaltyFamily::GroupMCP:
      if (r <= gamma * lambda) return lambda * r - r * r / (2.0 * gamma);
      return 0.5 * gamma * lambda * lambda;
    case PenaltyFamily::MultiTukey: {
      // Implicit penalty of the Tukey thresholding function: with
      // t = theta(s), P(t) = env(s) - (s - t)^2 / 2 where env is the
      // envelope-normalized loss (lambda^2/6) rho. theta is strictly
      // increasing, so s = theta^{-1}(r) is found by bisection.
      if (lambda == 0.0) return 0.0;
      if (r >= lambda) return lambda * lambda / 6.0;
      const auto theta = [lambda](double s) {
        const double w = 1.0 - (s / lambda) * (s / lambda);
        return s - s * w * w;
      };
      double lo = 0.0, hi = lambda;
      for (int i = 0; i < 120; ++i) {
        const double mid = 0.5 * (lo + hi);
        (theta(mid) < r ? lo : hi) = mid;
      }
      const double s = 0.5 * (lo + hi);
      const double w = 1.0 - (s / lambda) * (s / lambda);
      const double env = lambda * lambda / 6.0 * (1.0 - w * w * w);
      return env - 0.5 * (s - r) * (s - r);
    }
  }
  return 0.0;
}

double penalty_value(const Eigen::VectorXd& z, const PenaltySpec& spec) {
  check_finite(z);
  return penalty_value_radius(z.norm(), spec);
}

}  // namespace mtlrrc
