#include "mtlrrc/glm.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace mtlrrc {

namespace {

double log1p_exp(double eta) {
  // log(1 + e^eta) without overflow
  return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

void check_shapes(const TaskDataset& data, const TaskCoef& coef) {
  if (coef.coef.size() != data.p()) throw std::invalid_argument("glm: coefficient size != p");
  if (data.X.rows() != data.y.size()) throw std::invalid_argument("glm: X/y size mismatch");
}

}  // namespace

double glm_loss(const TaskDataset& data, const TaskCoef& coef) {
  check_shapes(data, coef);
  if (data.family == Family::Gaussian) {
    return 0.5 * (data.y - data.X * coef.coef).squaredNorm();
  }
  const Eigen::VectorXd eta = (data.X * coef.coef).array() + coef.intercept;
  double loss = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    loss -= data.y[i] * eta[i] - log1p_exp(eta[i]);
  }
  return loss;
}

Eigen::VectorXd glm_gradient(const TaskDataset& data, const TaskCoef& coef) {
  check_shapes(data, coef);
  if (data.family == Family::Gaussian) {
    return data.X.transpose() * (data.X * coef.coef - data.y);
  }
  const Eigen::VectorXd eta = (data.X * coef.coef).array() + coef.intercept;
  Eigen::VectorXd mu(data.n());
  for (int i = 0; i < data.n(); ++i) mu[i] = sigmoid(eta[i]);
  Eigen::VectorXd grad(data.p() + 1);
  grad[0] = (mu - data.y).sum();
  grad.tail(data.p()) = data.X.transpose() * (mu - data.y);
  return grad;
}

double prox_glm_objective(const TaskDataset& data, const TaskCoef& coef, const Eigen::VectorXd& u,
                          const Eigen::VectorXd& o, double lambda1) {
  return glm_loss(data, coef) / data.n() + 0.5 * lambda1 * (coef.coef - u - o).squaredNorm();
}

NewtonFit newton_raphson(const TaskDataset& data, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& o, double lambda1,
                         const NewtonOptions& options) {
  const int p = data.p();
  const double n = static_cast<double>(data.n());
  if (u.size() != p || o.size() != p) throw std::invalid_argument("newton_raphson: u/o size != p");
  if (lambda1 < 0.0) throw std::invalid_argument("newton_raphson: lambda1 must be >= 0");
  if (!(options.tol > 0.0)) throw std::invalid_argument("newton_raphson: tol must be > 0");

  const bool has_intercept = data.family == Family::Bernoulli;
  const int dim = has_intercept ? p + 1 : p;
  const Eigen::VectorXd target = u + o;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  const auto to_coef = [&](const Eigen::VectorXd& v) {
    TaskCoef c;
    c.intercept = has_intercept ? v[0] : 0.0;
    c.coef = has_intercept ? v.tail(p).eval() : v;
    return c;
  };

  NewtonFit fit;
  double objective = prox_glm_objective(data, to_coef(w), u, o, lambda1);
  fit.objective_trace.push_back(objective);

  Eigen::MatrixXd hessian(dim, dim);
  Eigen::VectorXd grad(dim);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    fit.iterations = iter;
    if (data.family == Family::Gaussian) {
      grad = data.X.transpose() * (data.X * w - data.y) / n + lambda1 * (w - target);
      hessian = data.X.transpose() * data.X / n;
      hessian.diagonal().array() += lambda1;
    } else {
      const Eigen::VectorXd eta = (data.X * w.tail(p)).array() + w[0];
      Eigen::VectorXd mu(data.n()), var(data.n());
      for (int i = 0; i < data.n(); ++i) {
        mu[i] = sigmoid(eta[i]);
        var[i] = mu[i] * (1.0 - mu[i]);
      }
      grad[0] = (mu - data.y).sum() / n;
      grad.tail(p) = data.X.transpose() * (mu - data.y) / n + lambda1 * (w.tail(p) - target);
      hessian(0, 0) = var.sum() / n;
      hessian.block(0, 1, 1, p) = (var.transpose() * data.X) / n;
      hessian.block(1, 0, p, 1) = hessian.block(0, 1, 1, p).transpose();
      hessian.block(1, 1, p, p) = data.X.transpose() * var.asDiagonal() * data.X / n;
      hessian.block(1, 1, p, p).diagonal().array() += lambda1;
    }

    const Eigen::VectorXd step = hessian.ldlt().solve(-grad);
    if (!step.allFinite() ||
        (hessian * step + grad).norm() > 1e-8 * (1.0 + grad.norm())) {
      throw NewtonError("singular Newton system at iteration " + std::to_string(iter), iter,
                        to_coef(w));
    }

    // Step halving keeps the objective non-increasing; logistic tasks with
    // near-separable data need it.
    double scale = 1.0;
    double candidate_objective = objective;
    Eigen::VectorXd candidate = w;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      candidate = w + scale * step;
      candidate_objective = prox_glm_objective(data, to_coef(candidate), u, o, lambda1);
      if (candidate_objective <= objective + 1e-14 * (1.0 + std::abs(objective))) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) {
      // No scaled step improves the objective: the iterate is at numerical
      // stationarity.
      fit.coef = to_coef(w);
      return fit;
    }

    const double change = (scale * step).lpNorm<Eigen::Infinity>();
    w = candidate;
    objective = candidate_objective;
    fit.objective_trace.push_back(objective);
    if (change <= options.tol) {
      fit.coef = to_coef(w);
      return fit;
    }
  }
  throw NewtonError("Newton solver did not converge in " + std::to_string(options.max_iter) +
                        " iterations",
                    options.max_iter, to_coef(w));
}

}  // namespace mtlrrc
