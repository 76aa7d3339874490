#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

#include "mtlrrc/data.hpp"
#include "mtlrrc/penalty.hpp"
#include "mtlrrc/task_graph.hpp"

namespace mtlrrc {

struct HyperParams {
  double lambda1 = 0.0;  // coefficient-to-centroid coupling
  double lambda2 = 0.0;  // centroid fusion
  double lambda3 = 0.0;  // outlier penalty scale
  PenaltyFamily penalty_family = PenaltyFamily::GroupLasso;
  double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN -> family default
  double nu = 1.0;  // ADMM tuning parameter
  int k = 5;        // neighbor count used for the task graph

  double resolved_gamma() const;

  // Penalty at scale lambda3 (as written in the objective).
  PenaltySpec outlier_penalty() const;

  // Penalty at scale lambda3/lambda1, the thresholding scale of the O
  // update. lambda1 = 0 with lambda3 > 0 is rejected; lambda3 = 0 maps to
  // scale 0.
  PenaltySpec outlier_prox_penalty() const;

  void validate() const;
};

struct ModelParams {
  Eigen::VectorXd w0;  // T intercepts (zero for Gaussian tasks)
  Eigen::MatrixXd W;   // T x p coefficients
  Eigen::MatrixXd U;   // T x p centroids
  Eigen::MatrixXd O;   // T x p outlier parameters
  Eigen::MatrixXd S;   // |E| x p dual matrix, rows in graph edge order
};

struct StationarityResidual {
  double regression = 0.0;
  double clustering = 0.0;
};

struct FitResult {
  ModelParams params;
  std::vector<double> objective_trace;
  int outer_iters = 0;
  bool converged = false;
  StationarityResidual stationarity;
  std::vector<int> outlier_tasks;    // tasks with ||o_m|| > 0, 0-based
  std::vector<int> cluster_labels;   // 0-based labels from centroid fusion
  std::vector<std::string> warnings;
};

struct FitOptions {
  double tol = 1e-6;        // ADMM outer: relative Frobenius change of W
  int max_outer = 500;
  double fista_tol = 1e-8;  // inner FISTA: sup-norm change of the iterate
  int max_fista = 2000;

  double bcd_tol = 1e-8;    // BCD: sup-norm change over all blocks
  int max_sweeps = 200;
  double inner_tol = 1e-10;  // clustering subproblem inside a BCD sweep
  int inner_max_iter = 5000;

  double newton_tol = 1e-10;
  int newton_max_iter = 100;

  std::optional<Eigen::MatrixXd> u_init;  // default: single-task ridge coefficients
  double stl_ridge = 1e-2;
  bool freeze_outliers = false;  // pin O = 0 (the convex-clustering special case)
  int n_threads = 1;             // parallelism of the per-task coefficient updates
};

// Projection onto the Euclidean ball of the given radius (0 stays 0).
Eigen::VectorXd project_to_ball(const Eigen::VectorXd& z, double radius);

// Gradient of the partially minimized augmented-Lagrangian U objective
// phi1 at C: quad_weight (C - M) + A_E^T F with
// F_e = project_to_ball(s_e + nu (c_{m1} - c_{m2}), lambda_fuse r_e).
// M stands for W - O in the full solver.
Eigen::MatrixXd u_step_gradient(const Eigen::MatrixXd& C, const Eigen::MatrixXd& M,
                                const Eigen::MatrixXd& S, double quad_weight, double lambda_fuse,
                                double nu, const TaskGraph& graph);

struct FusedProxOptions {
  double nu = 1.0;
  double tol = 1e-10;
  int max_iter = 5000;
  double fista_tol = 1e-10;
  int max_fista = 5000;
};

struct FusedProxResult {
  Eigen::MatrixXd U;
  Eigen::MatrixXd S;
  int iterations = 0;
  bool converged = false;
};

// Solves min_U (quad_weight/2)||U - M||_F^2 + lambda_fuse sum_e r_e ||u_{m1} - u_{m2}||_2
// (weighted convex clustering) by the dual-ascent ADMM with a FISTA inner
// loop. U0/S0 warm-start the iteration.
FusedProxResult fused_prox(const Eigen::MatrixXd& M, double quad_weight, double lambda_fuse,
                           const TaskGraph& graph, const FusedProxOptions& options = {},
                           const Eigen::MatrixXd* U0 = nullptr,
                           const Eigen::MatrixXd* S0 = nullptr);

// Single-task ridge coefficients, one row per task (intercepts dropped).
// Used for the k-NN graph and as the default centroid initialization.
Eigen::MatrixXd stl_ridge_coefficients(const MultiTaskData& data, double ridge,
                                       int n_threads = 1);

// Full objective: sum_m (1/n_m) L_m + (lambda1/2)||W-U-O||_F^2
// + lambda2 fused_norm(U) + lambda1 sum_m P(o_m; lambda3/lambda1, gamma).
// The outlier term is normalized so that the O update in the fitting
// algorithms is its exact minimizer; for group lasso it equals
// lambda3 sum ||o_m||.
double mtlrrc_objective(const MultiTaskData& data, const ModelParams& params,
                        const TaskGraph& graph, const HyperParams& hp);

// Objective with the outlier parameters eliminated through the implied
// robust loss: sum_m (1/n_m) L_m + lambda1 sum_m rho(w_m - u_m; lambda3/lambda1, gamma)
// + lambda2 fused_norm(U). Coincides with mtlrrc_objective at O = Theta(W - U)
// for GroupLasso (multivariate Huber), GroupSCAD and GroupMCP.
double robust_objective(const MultiTaskData& data, const Eigen::VectorXd& w0,
                        const Eigen::MatrixXd& W, const Eigen::MatrixXd& U,
                        const TaskGraph& graph, const HyperParams& hp);

// Least-norm stationarity residual of -V + lambda_fuse d fused_norm(U) = 0:
// edges with distinct centroids contribute their fixed unit-direction
// subgradient; near-fused edges (||u_{m1} - u_{m2}|| below fuse_tol at the
// local scale) carry free ball-constrained blocks fit by projected least
// squares. Returns the sup-norm of the best residual.
double fusion_stationarity_residual(const Eigen::MatrixXd& V, const Eigen::MatrixXd& U,
                                    const TaskGraph& graph, double lambda_fuse,
                                    double fuse_tol = 1e-6);

// Modified ADMM (per-task Newton W step, FISTA U step, thresholding O step,
// ball-projection dual step). Non-convergence within max_outer is reported
// as a warning on the result, not an error.
FitResult fit_admm(const MultiTaskData& data, const TaskGraph& graph, const HyperParams& hp,
                   const FitOptions& options = {});

// Exact block coordinate descent reference solver; the objective trace is
// non-increasing by construction.
FitResult fit_bcd(const MultiTaskData& data, const TaskGraph& graph, const HyperParams& hp,
                  const FitOptions& options = {});

// First-order conditions at the fitted point: max over tasks of the
// sup-norm of the regression condition, and the least-norm subgradient
// residual of the clustering condition.
StationarityResidual check_stationarity_mtlrrc(const MultiTaskData& data, const FitResult& result,
                                               const TaskGraph& graph, const HyperParams& hp);

}  // namespace mtlrrc
