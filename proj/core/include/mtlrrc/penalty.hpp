#pragma once

#include <Eigen/Core>

#include <limits>
#include <string>
#include <vector>

namespace mtlrrc {

// Group-sparse penalty families. Each family comes with a closed-form
// group-thresholding function theta (the proximal map of the penalty along
// the ray of the input), a score function psi = id - theta, and the
// multivariate robust loss rho whose gradient is psi.
enum class PenaltyFamily { GroupLasso, GroupSCAD, GroupMCP, MultiTukey };

const char* to_string(PenaltyFamily family);
PenaltyFamily penalty_family_from_string(const std::string& name);

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::GroupLasso;
  double lambda = 0.0;  // threshold scale, >= 0
  // Shape parameter. Required > 2 for GroupSCAD and > 1 for GroupMCP;
  // ignored by GroupLasso and MultiTukey.
  double gamma = std::numeric_limits<double>::quiet_NaN();

  static double default_gamma(PenaltyFamily family);
  static PenaltySpec group_lasso(double lambda);
  static PenaltySpec group_scad(double lambda, double gamma = 3.7);
  static PenaltySpec group_mcp(double lambda, double gamma = 3.0);
  static PenaltySpec multi_tukey(double lambda);

  PenaltySpec with_lambda(double new_lambda) const;

  // Throws std::invalid_argument when lambda or gamma violate the family
  // bounds. Returns warnings for fields that are set but ignored
  // (MultiTukey takes no gamma).
  std::vector<std::string> validate() const;
};

// S(z; lambda) = max(0, 1 - lambda/||z||_2) z, with S(0) = 0.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& z, double lambda);

// Family thresholding function Theta(z; lambda, gamma). Output is a
// nonnegative scalar multiple of z; it is exactly zero for small ||z||_2
// (except MultiTukey, which vanishes only at z = 0) and equals z beyond the
// family's identity radius.
Eigen::VectorXd threshold(const Eigen::VectorXd& z, const PenaltySpec& spec);

// psi(z) = z - Theta(z), the score of the implied multivariate robust loss.
Eigen::VectorXd psi(const Eigen::VectorXd& z, const PenaltySpec& spec);

// The multivariate robust loss rho(z; lambda, gamma). For GroupLasso this
// is the multivariate Huber function (the Moreau envelope of
// lambda ||.||_2). GroupSCAD and GroupMCP likewise evaluate the Moreau
// envelope of their penalty. MultiTukey saturates at 1 outside radius
// lambda; this normalization scales the envelope by 6/lambda^2, so for
// MultiTukey grad rho = (6/lambda^2) psi rather than psi itself.
double robust_loss(const Eigen::VectorXd& z, const PenaltySpec& spec);

// The penalty P(z; lambda, gamma) as it appears inside an objective:
// GroupLasso lambda||z||, and the usual group SCAD / group MCP forms.
// MultiTukey's penalty has no closed form; it is recovered from the
// thresholding function by inverting it numerically.
double penalty_value(const Eigen::VectorXd& z, const PenaltySpec& spec);

// Radial forms: all four families act on z only through ||z||_2, scaling z
// by theta(r)/r. These evaluate the scalar profiles at radius r >= 0.
double threshold_radius(double r, const PenaltySpec& spec);
double robust_loss_radius(double r, const PenaltySpec& spec);
double penalty_value_radius(double r, const PenaltySpec& spec);

}  // namespace mtlrrc
