#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <vector>

#include "mtlrrc/penalty.hpp"
#include "mtlrrc/task_graph.hpp"

namespace mtlrrc {

struct RccOptions {
  double tol = 1e-8;  // sup-norm change of U and O per sweep
  int max_sweeps = 200;
  double inner_tol = 1e-10;  // convex-clustering subproblem
  int inner_max_iter = 5000;
  int max_fista = 5000;
  double nu = 1.0;
  std::optional<Eigen::MatrixXd> o_init;  // default: zero (no-outlier prior)
};

struct RccState {
  Eigen::MatrixXd U;
  Eigen::MatrixXd O;
  std::vector<double> objective_trace;  // one entry per sweep, non-increasing
  int sweeps = 0;
  bool converged = false;
};

class RccError : public std::runtime_error {
 public:
  RccError(const std::string& what, RccState last) : std::runtime_error(what), state(std::move(last)) {}
  RccState state;  // last iterate with its objective trace
};

// (1/2)||X - U - O||_F^2 + lambda1 fused_norm(U) + sum_i P(o_i; penalty).
double rrc_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const Eigen::MatrixXd& O,
                     const TaskGraph& graph, double lambda1, const PenaltySpec& penalty);

// Robust regularized clustering by block coordinate descent: the centroid
// block is a convex-clustering solve with responses X - O, the outlier
// block is the exact row-wise thresholding update.
RccState solve_rrc(const Eigen::MatrixXd& X, const TaskGraph& graph, double lambda1,
                   const PenaltySpec& penalty, const RccOptions& options = {});

// Least-norm residual of the first-order condition
// -Psi(X - U; penalty) + lambda1 d fused_norm(U) = 0 at the state.
double check_stationarity_rrc(const Eigen::MatrixXd& X, const RccState& state,
                              const TaskGraph& graph, double lambda1,
                              const PenaltySpec& penalty);

// Connected components over graph edges whose endpoint centroids agree to
// rel_tol at the local scale; labels are numbered by first appearance.
std::vector<int> cluster_labels(const Eigen::MatrixXd& U, const TaskGraph& graph,
                                double rel_tol = 1e-4);

}  // namespace mtlrrc
