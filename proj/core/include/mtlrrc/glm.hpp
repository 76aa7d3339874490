#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

#include "mtlrrc/data.hpp"

namespace mtlrrc {

struct TaskCoef {
  double intercept = 0.0;  // always 0 for Gaussian tasks
  Eigen::VectorXd coef;
};

// Negative log-likelihood loss. Gaussian: (1/2)||y - X w||^2 with the
// intercept excluded. Bernoulli: -sum_i [y_i eta_i - log(1 + exp(eta_i))]
// with eta_i = intercept + x_i' w, evaluated in log1p form.
double glm_loss(const TaskDataset& data, const TaskCoef& coef);

// Gradient of glm_loss. For Bernoulli the first entry is d/d intercept;
// Gaussian gradients have p entries (no intercept).
Eigen::VectorXd glm_gradient(const TaskDataset& data, const TaskCoef& coef);

// (1/n) glm_loss + (lambda1/2)||w - u - o||^2, the per-task objective the
// Newton solver minimizes. The intercept is not penalized.
double prox_glm_objective(const TaskDataset& data, const TaskCoef& coef, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& o, double lambda1);

struct NewtonOptions {
  double tol = 1e-8;  // sup-norm coefficient change
  int max_iter = 100;
};

struct NewtonFit {
  TaskCoef coef;
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted iterates, non-increasing
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& what, int iterations, TaskCoef last)
      : std::runtime_error(what), iterations(iterations), last(std::move(last)) {}
  int iterations;
  TaskCoef last;
};

// Ridge-proximal GLM solve of min_w (1/n) L(w0, w) + (lambda1/2)||w-u-o||^2.
// Gaussian reduces to a linear solve and converges in one step; Bernoulli
// iterates damped Newton (step halving when a full step would increase the
// objective). Throws NewtonError on a singular system or when max_iter is
// exhausted, carrying the last iterate.
NewtonFit newton_raphson(const TaskDataset& data, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& o, double lambda1,
                         const NewtonOptions& options = {});

}  // namespace mtlrrc
