#pragma once

namespace mtlrrc {

// Inverse standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Quantile of the chi-square distribution with dof degrees of freedom,
// by Newton refinement of the incomplete-gamma inverse.
double chi_square_quantile(double p, double dof);

}  // namespace mtlrrc
