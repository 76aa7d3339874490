#include "mtlrrc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mtlrrc/clustering.hpp"
#include "mtlrrc/glm.hpp"
#include "mtlrrc/util.hpp"

namespace mtlrrc {

double HyperParams::resolved_gamma() const {
  return std::isnan(gamma) ? PenaltySpec::default_gamma(penalty_family) : gamma;
}

PenaltySpec HyperParams::outlier_penalty() const {
  return {penalty_family, lambda3, resolved_gamma()};
}

PenaltySpec HyperParams::outlier_prox_penalty() const {
  const double scale = lambda3 == 0.0 ? 0.0 : lambda3 / lambda1;
  return {penalty_family, scale, resolved_gamma()};
}

void HyperParams::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw std::invalid_argument("hyperparameters must be >= 0");
  }
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
  if (lambda1 == 0.0 && lambda3 > 0.0) {
    throw std::invalid_argument(
        "lambda1 = 0 with lambda3 > 0 leaves the outlier threshold lambda3/lambda1 undefined");
  }
  outlier_prox_penalty().validate();
}

Eigen::VectorXd project_to_ball(const Eigen::VectorXd& z, double radius) {
  const double norm = z.norm();
  if (norm <= radius || norm == 0.0) return z;
  return (radius / norm) * z;
}

namespace {

// F rows for the U-step gradient: F_e = proj(s_e + nu Delta_e(C), lambda_fuse r_e).
Eigen::MatrixXd dual_candidates(const Eigen::MatrixXd& C, const Eigen::MatrixXd& S,
                                double lambda_fuse, double nu, const TaskGraph& graph) {
  Eigen::MatrixXd F(graph.n_edges(), C.cols());
  for (int e = 0; e < graph.n_edges(); ++e) {
    const auto& edge = graph.edges[e];
    const Eigen::VectorXd z =
        S.row(e).transpose() + nu * (C.row(edge.m1) - C.row(edge.m2)).transpose();
    F.row(e) = project_to_ball(z, lambda_fuse * edge.weight).transpose();
  }
  return F;
}

double fista_step_size(const TaskGraph& graph, double quad_weight, double nu) {
  int max_degree = 0;
  for (int d : graph.degrees()) max_degree = std::max(max_degree, d);
  const double lipschitz = quad_weight + 2.0 * nu * max_degree;
  return lipschitz > 0.0 ? 1.0 / lipschitz : 1.0;
}

// One FISTA solve of the partially minimized U objective with S held fixed.
Eigen::MatrixXd fista_u_solve(Eigen::MatrixXd U, const Eigen::MatrixXd& M,
                              const Eigen::MatrixXd& S, double quad_weight, double lambda_fuse,
                              double nu, const TaskGraph& graph, double step, double tol,
                              int max_iter) {
  Eigen::MatrixXd H = U;
  Eigen::MatrixXd C = U;
  double alpha = 1.0;
  for (int l = 0; l < max_iter; ++l) {
    const Eigen::MatrixXd grad =
        quad_weight * (C - M) + apply_incidence_transpose(
                                    dual_candidates(C, S, lambda_fuse, nu, graph), graph);
    const Eigen::MatrixXd H_next = C - step * grad;
    const double alpha_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha));
    const double change = (H_next - H).lpNorm<Eigen::Infinity>();
    C = H_next + ((alpha - 1.0) / alpha_next) * (H_next - H);
    H = H_next;
    alpha = alpha_next;
    if (change <= tol) break;
  }
  return H;
}

Eigen::MatrixXd dual_step(const Eigen::MatrixXd& S, const Eigen::MatrixXd& U, double lambda_fuse,
                          double nu, const TaskGraph& graph) {
  return dual_candidates(U, S, lambda_fuse, nu, graph);
}

}  // namespace

Eigen::MatrixXd u_step_gradient(const Eigen::MatrixXd& C, const Eigen::MatrixXd& M,
                                const Eigen::MatrixXd& S, double quad_weight, double lambda_fuse,
                                double nu, const TaskGraph& graph) {
  return quad_weight * (C - M) +
         apply_incidence_transpose(dual_candidates(C, S, lambda_fuse, nu, graph), graph);
}

FusedProxResult fused_prox(const Eigen::MatrixXd& M, double quad_weight, double lambda_fuse,
                           const TaskGraph& graph, const FusedProxOptions& options,
                           const Eigen::MatrixXd* U0, const Eigen::MatrixXd* S0) {
  if (!(quad_weight > 0.0)) throw std::invalid_argument("fused_prox: quad_weight must be > 0");
  FusedProxResult result;
  if (lambda_fuse == 0.0 || graph.n_edges() == 0) {
    result.U = M;
    result.S = Eigen::MatrixXd::Zero(graph.n_edges(), M.cols());
    result.converged = true;
    return result;
  }
  result.U = U0 ? *U0 : M;
  result.S = S0 ? *S0 : Eigen::MatrixXd::Zero(graph.n_edges(), M.cols());
  const double step = fista_step_size(graph, quad_weight, options.nu);
  for (int it = 1; it <= options.max_iter; ++it) {
    result.iterations = it;
    const Eigen::MatrixXd U_next =
        fista_u_solve(result.U, M, result.S, quad_weight, lambda_fuse, options.nu, graph, step,
                      options.fista_tol, options.max_fista);
    const Eigen::MatrixXd S_next = dual_step(result.S, U_next, lambda_fuse, options.nu, graph);
    const double change = std::max((U_next - result.U).lpNorm<Eigen::Infinity>(),
                                   (S_next - result.S).lpNorm<Eigen::Infinity>());
    result.U = U_next;
    result.S = S_next;
    if (change <= options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Eigen::MatrixXd stl_ridge_coefficients(const MultiTaskData& data, double ridge, int n_threads) {
  Eigen::MatrixXd W(data.n_tasks(), data.n_features());
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(data.n_features());
  parallel_for(data.n_tasks(), n_threads, [&](int m) {
    W.row(m) = newton_raphson(data.tasks[m], zero, zero, ridge).coef.coef.transpose();
  });
  return W;
}

double mtlrrc_objective(const MultiTaskData& data, const ModelParams& params,
                        const TaskGraph& graph, const HyperParams& hp) {
  double value = 0.0;
  for (int m = 0; m < data.n_tasks(); ++m) {
    TaskCoef c{params.w0[m], params.W.row(m).transpose()};
    value += glm_loss(data.tasks[m], c) / data.tasks[m].n();
  }
  value += 0.5 * hp.lambda1 * (params.W - params.U - params.O).squaredNorm();
  value += hp.lambda2 * fused_norm(params.U, graph);
  if (hp.lambda1 > 0.0 && hp.lambda3 > 0.0) {
    const PenaltySpec pen = hp.outlier_prox_penalty();
    for (int m = 0; m < data.n_tasks(); ++m) {
      value += hp.lambda1 * penalty_value(params.O.row(m).transpose(), pen);
    }
  }
  return value;
}

double robust_objective(const MultiTaskData& data, const Eigen::VectorXd& w0,
                        const Eigen::MatrixXd& W, const Eigen::MatrixXd& U,
                        const TaskGraph& graph, const HyperParams& hp) {
  double value = 0.0;
  for (int m = 0; m < data.n_tasks(); ++m) {
    TaskCoef c{w0[m], W.row(m).transpose()};
    value += glm_loss(data.tasks[m], c) / data.tasks[m].n();
  }
  if (hp.lambda1 > 0.0) {
    const PenaltySpec pen = hp.outlier_prox_penalty();
    for (int m = 0; m < data.n_tasks(); ++m) {
      value += hp.lambda1 * robust_loss((W.row(m) - U.row(m)).transpose(), pen);
    }
  }
  value += hp.lambda2 * fused_norm(U, graph);
  return value;
}

double fusion_stationarity_residual(const Eigen::MatrixXd& V, const Eigen::MatrixXd& U,
                                    const TaskGraph& graph, double lambda_fuse, double fuse_tol) {
  const int p = static_cast<int>(U.cols());
  Eigen::MatrixXd residual = -V;
  std::vector<int> fused_edges;
  for (int e = 0; e < graph.n_edges(); ++e) {
    const auto& edge = graph.edges[e];
    const Eigen::VectorXd diff = (U.row(edge.m1) - U.row(edge.m2)).transpose();
    const double scale = 1.0 + U.row(edge.m1).norm() + U.row(edge.m2).norm();
    if (diff.norm() > fuse_tol * scale) {
      const Eigen::VectorXd g = lambda_fuse * edge.weight * diff / diff.norm();
      residual.row(edge.m1) += g.transpose();
      residual.row(edge.m2) -= g.transpose();
    } else {
      fused_edges.push_back(e);
    }
  }
  if (fused_edges.empty() || lambda_fuse == 0.0) {
    return residual.lpNorm<Eigen::Infinity>();
  }

  // Fit the free ball-constrained blocks of the fused edges by projected
  // gradient on the squared residual.
  const int n_free = static_cast<int>(fused_edges.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_free, p);
  std::vector<int> degree(graph.n_tasks, 0);
  for (int e : fused_edges) {
    ++degree[graph.edges[e].m1];
    ++degree[graph.edges[e].m2];
  }
  const int max_degree = *std::max_element(degree.begin(), degree.end());
  const double step = 1.0 / (2.0 * max_degree);
  Eigen::MatrixXd R = residual;
  for (int it = 0; it < 20000; ++it) {
    R = residual;
    for (int i = 0; i < n_free; ++i) {
      const auto& edge = graph.edges[fused_edges[i]];
      R.row(edge.m1) += G.row(i);
      R.row(edge.m2) -= G.row(i);
    }
    double change = 0.0;
    for (int i = 0; i < n_free; ++i) {
      const auto& edge = graph.edges[fused_edges[i]];
      const Eigen::VectorXd grad = (R.row(edge.m1) - R.row(edge.m2)).transpose();
      const Eigen::VectorXd next =
          project_to_ball(G.row(i).transpose() - step * grad, lambda_fuse * edge.weight);
      change = std::max(change, (next - G.row(i).transpose()).lpNorm<Eigen::Infinity>());
      G.row(i) = next.transpose();
    }
    if (change <= 1e-14) break;
  }
  R = residual;
  for (int i = 0; i < n_free; ++i) {
    const auto& edge = graph.edges[fused_edges[i]];
    R.row(edge.m1) += G.row(i);
    R.row(edge.m2) -= G.row(i);
  }
  return R.lpNorm<Eigen::Infinity>();
}

namespace {

// Per-task regression first-order condition: the psi matrix is Psi(W - U)
// for free-outlier fits and W - U - O when O is pinned.
StationarityResidual compute_stationarity(const MultiTaskData& data, const Eigen::VectorXd& w0,
                                          const Eigen::MatrixXd& W, const Eigen::MatrixXd& U,
                                          const Eigen::MatrixXd& O, const TaskGraph& graph,
                                          const HyperParams& hp, bool frozen_outliers) {
  const int p = data.n_features();
  Eigen::MatrixXd psi_matrix(data.n_tasks(), p);
  if (hp.lambda1 == 0.0) {
    psi_matrix.setZero();
  } else if (frozen_outliers) {
    psi_matrix = W - U - O;
  } else {
    const PenaltySpec pen = hp.outlier_prox_penalty();
    for (int m = 0; m < data.n_tasks(); ++m) {
      psi_matrix.row(m) = psi((W.row(m) - U.row(m)).transpose(), pen).transpose();
    }
  }

  StationarityResidual out;
  for (int m = 0; m < data.n_tasks(); ++m) {
    TaskCoef c{w0[m], W.row(m).transpose()};
    Eigen::VectorXd grad = glm_gradient(data.tasks[m], c) / data.tasks[m].n();
    grad.tail(p) += hp.lambda1 * psi_matrix.row(m).transpose();
    out.regression = std::max(out.regression, grad.lpNorm<Eigen::Infinity>());
  }
  out.clustering =
      fusion_stationarity_residual(hp.lambda1 * psi_matrix, U, graph, hp.lambda2);
  return out;
}

void finalize(FitResult& result, const MultiTaskData& data, const TaskGraph& graph,
              const HyperParams& hp, bool frozen_outliers) {
  for (int m = 0; m < data.n_tasks(); ++m) {
    if (result.params.O.row(m).norm() > 0.0) result.outlier_tasks.push_back(m);
  }
  result.cluster_labels = cluster_labels(result.params.U, graph);
  result.stationarity =
      compute_stationarity(data, result.params.w0, result.params.W, result.params.U,
                           result.params.O, graph, hp, frozen_outliers);
}

ModelParams init_params(const MultiTaskData& data, const TaskGraph& graph,
                        const FitOptions& options) {
  ModelParams params;
  params.w0 = Eigen::VectorXd::Zero(data.n_tasks());
  params.W = Eigen::MatrixXd::Zero(data.n_tasks(), data.n_features());
  if (options.u_init) {
    if (options.u_init->rows() != data.n_tasks() || options.u_init->cols() != data.n_features()) {
      throw std::invalid_argument("u_init has wrong shape");
    }
    params.U = *options.u_init;
  } else {
    params.U = stl_ridge_coefficients(data, options.stl_ridge, options.n_threads);
  }
  params.O = Eigen::MatrixXd::Zero(data.n_tasks(), data.n_features());
  params.S = Eigen::MatrixXd::Zero(graph.n_edges(), data.n_features());
  return params;
}

void newton_w_step(const MultiTaskData& data, ModelParams& params, double lambda1,
                   const FitOptions& options) {
  NewtonOptions newton_options{options.newton_tol, options.newton_max_iter};
  parallel_for(data.n_tasks(), options.n_threads, [&](int m) {
    try {
      const NewtonFit fit = newton_raphson(data.tasks[m], params.U.row(m).transpose(),
                                           params.O.row(m).transpose(), lambda1, newton_options);
      params.w0[m] = fit.coef.intercept;
      params.W.row(m) = fit.coef.coef.transpose();
    } catch (const NewtonError& err) {
      throw std::runtime_error("task " + std::to_string(m + 1) + ": " + err.what());
    }
  });
}

void threshold_o_step(ModelParams& params, const HyperParams& hp) {
  const PenaltySpec pen = hp.outlier_prox_penalty();
  for (int m = 0; m < params.O.rows(); ++m) {
    params.O.row(m) =
        threshold((params.W.row(m) - params.U.row(m)).transpose(), pen).transpose();
  }
}

}  // namespace

FitResult fit_admm(const MultiTaskData& data, const TaskGraph& graph, const HyperParams& hp,
                   const FitOptions& options) {
  data.validate();
  hp.validate();
  if (graph.n_tasks != data.n_tasks()) {
    throw std::invalid_argument("fit_admm: graph covers a different task count");
  }

  FitResult result;
  result.params = init_params(data, graph, options);
  ModelParams& params = result.params;
  const double step = fista_step_size(graph, hp.lambda1, hp.nu);

  Eigen::MatrixXd W_prev = params.W;
  for (int t = 1; t <= options.max_outer; ++t) {
    result.outer_iters = t;
    newton_w_step(data, params, hp.lambda1, options);
    params.U = fista_u_solve(params.U, params.W - params.O, params.S, hp.lambda1, hp.lambda2,
                             hp.nu, graph, step, options.fista_tol, options.max_fista);
    if (!options.freeze_outliers) threshold_o_step(params, hp);
    params.S = dual_step(params.S, params.U, hp.lambda2, hp.nu, graph);

    result.objective_trace.push_back(mtlrrc_objective(data, params, graph, hp));
    const double change = (params.W - W_prev).norm();
    W_prev = params.W;
    if (change <= options.tol * (1.0 + W_prev.norm())) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    result.warnings.push_back("ADMM reached max_outer = " + std::to_string(options.max_outer) +
                              " before the coefficient change dropped below tolerance");
  }
  finalize(result, data, graph, hp, options.freeze_outliers);
  return result;
}

FitResult fit_bcd(const MultiTaskData& data, const TaskGraph& graph, const HyperParams& hp,
                  const FitOptions& options) {
  data.validate();
  hp.validate();
  if (graph.n_tasks != data.n_tasks()) {
    throw std::invalid_argument("fit_bcd: graph covers a different task count");
  }

  FitResult result;
  result.params = init_params(data, graph, options);
  ModelParams& params = result.params;

  if (hp.lambda1 == 0.0) {
    // The blocks decouple: W solves the plain GLMs, the fusion term is
    // minimized by any fully fused centroid matrix, and the outlier term
    // vanishes.
    newton_w_step(data, params, 0.0, options);
    params.U = params.W.colwise().mean().replicate(data.n_tasks(), 1);
    params.O.setZero();
    result.objective_trace.push_back(mtlrrc_objective(data, params, graph, hp));
    result.outer_iters = 1;
    result.converged = true;
    finalize(result, data, graph, hp, options.freeze_outliers);
    return result;
  }

  FusedProxOptions inner;
  inner.nu = hp.nu;
  inner.tol = options.inner_tol;
  inner.max_iter = options.inner_max_iter;
  inner.fista_tol = options.inner_tol;
  inner.max_fista = options.max_fista;

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    result.outer_iters = sweep;
    const Eigen::VectorXd w0_prev = params.w0;
    const Eigen::MatrixXd W_prev = params.W;
    const Eigen::MatrixXd U_prev = params.U;
    const Eigen::MatrixXd O_prev = params.O;

    newton_w_step(data, params, hp.lambda1, options);
    const FusedProxResult clustering = fused_prox(params.W - params.O, hp.lambda1, hp.lambda2,
                                                  graph, inner, &params.U, &params.S);
    params.U = clustering.U;
    params.S = clustering.S;
    if (!options.freeze_outliers) threshold_o_step(params, hp);

    result.objective_trace.push_back(mtlrrc_objective(data, params, graph, hp));
    const double change =
        std::max({(params.w0 - w0_prev).lpNorm<Eigen::Infinity>(),
                  (params.W - W_prev).lpNorm<Eigen::Infinity>(),
                  (params.U - U_prev).lpNorm<Eigen::Infinity>(),
                  (params.O - O_prev).lpNorm<Eigen::Infinity>()});
    if (change <= options.bcd_tol) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    result.warnings.push_back("BCD reached max_sweeps = " + std::to_string(options.max_sweeps) +
                              " before the block change dropped below tolerance");
  }
  finalize(result, data, graph, hp, options.freeze_outliers);
  return result;
}

StationarityResidual check_stationarity_mtlrrc(const MultiTaskData& data, const FitResult& result,
                                               const TaskGraph& graph, const HyperParams& hp) {
  return compute_stationarity(data, result.params.w0, result.params.W, result.params.U,
                              result.params.O, graph, hp, /*frozen_outliers=*/false);
}

}  // namespace mtlrrc
