#include "mtlrrc/clustering.hpp"

#include <numeric>
#include <stdexcept>

#include "mtlrrc/solver.hpp"

namespace mtlrrc {

double rrc_objective(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U, const Eigen::MatrixXd& O,
                     const TaskGraph& graph, double lambda1, const PenaltySpec& penalty) {
  double value = 0.5 * (X - U - O).squaredNorm() + lambda1 * fused_norm(U, graph);
  for (int i = 0; i < X.rows(); ++i) {
    value += penalty_value(O.row(i).transpose(), penalty);
  }
  return value;
}

RccState solve_rrc(const Eigen::MatrixXd& X, const TaskGraph& graph, double lambda1,
                   const PenaltySpec& penalty, const RccOptions& options) {
  if (X.rows() != graph.n_tasks) throw std::invalid_argument("solve_rrc: row count != n_tasks");
  if (lambda1 < 0.0) throw std::invalid_argument("solve_rrc: lambda1 must be >= 0");
  penalty.validate();

  RccState state;
  state.U = X;
  state.O = options.o_init ? *options.o_init : Eigen::MatrixXd::Zero(X.rows(), X.cols());
  if (state.O.rows() != X.rows() || state.O.cols() != X.cols()) {
    throw std::invalid_argument("solve_rrc: o_init has wrong shape");
  }

  FusedProxOptions inner;
  inner.nu = options.nu;
  inner.tol = options.inner_tol;
  inner.max_iter = options.inner_max_iter;
  inner.fista_tol = options.inner_tol;
  inner.max_fista = options.max_fista;

  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(graph.n_edges(), X.cols());
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    state.sweeps = sweep;
    const Eigen::MatrixXd U_prev = state.U;
    const Eigen::MatrixXd O_prev = state.O;

    const FusedProxResult clustering =
        fused_prox(X - state.O, 1.0, lambda1, graph, inner, &state.U, &S);
    state.U = clustering.U;
    S = clustering.S;
    for (int i = 0; i < X.rows(); ++i) {
      state.O.row(i) = threshold((X.row(i) - state.U.row(i)).transpose(), penalty).transpose();
    }

    state.objective_trace.push_back(rrc_objective(X, state.U, state.O, graph, lambda1, penalty));
    const double change = std::max((state.U - U_prev).lpNorm<Eigen::Infinity>(),
                                   (state.O - O_prev).lpNorm<Eigen::Infinity>());
    if (change <= options.tol) {
      state.converged = true;
      return state;
    }
  }
  throw RccError("solve_rrc did not converge in " + std::to_string(options.max_sweeps) +
                     " sweeps (last objective " + std::to_string(state.objective_trace.back()) +
                     ")",
                 state);
}

double check_stationarity_rrc(const Eigen::MatrixXd& X, const RccState& state,
                              const TaskGraph& graph, double lambda1,
                              const PenaltySpec& penalty) {
  Eigen::MatrixXd psi_matrix(X.rows(), X.cols());
  for (int i = 0; i < X.rows(); ++i) {
    psi_matrix.row(i) = psi((X.row(i) - state.U.row(i)).transpose(), penalty).transpose();
  }
  return fusion_stationarity_residual(psi_matrix, state.U, graph, lambda1);
}

std::vector<int> cluster_labels(const Eigen::MatrixXd& U, const TaskGraph& graph,
                                double rel_tol) {
  const int n = static_cast<int>(U.rows());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (const auto& e : graph.edges) {
    const double gap = (U.row(e.m1) - U.row(e.m2)).norm();
    if (gap <= rel_tol * (1.0 + U.row(e.m1).norm())) {
      parent[std::max(find(e.m1), find(e.m2))] = std::min(find(e.m1), find(e.m2));
    }
  }
  std::vector<int> labels(n, -1);
  int next_label = 0;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (labels[root] < 0) labels[root] = next_label++;
    labels[i] = labels[root];
  }
  return labels;
}

}  // namespace mtlrrc
