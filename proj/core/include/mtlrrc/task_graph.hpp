#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <vector>

namespace mtlrrc {

// Weighted task graph. Edges are kept in lexicographic (m1 < m2) order;
// dual-variable rows elsewhere follow the same order. Weights come from the
// symmetrized k-NN rule and are therefore in {0.5, 1} when built by
// knn_weights, but any positive weight is accepted.
struct TaskGraph {
  struct Edge {
    int m1;
    int m2;
    double weight;
  };

  int n_tasks = 0;
  std::vector<Edge> edges;
  int k = 0;  // neighbor count used for construction, 0 when assembled by hand

  int n_edges() const { return static_cast<int>(edges.size()); }

  // Unweighted degree of each task in E; these are the diagonal entries of
  // A_E^T A_E.
  std::vector<int> degrees() const;

  // Validates and normalizes an explicit edge list (orders endpoints,
  // sorts lexicographically, rejects self-loops / duplicates / weights <= 0).
  static TaskGraph from_edges(int n_tasks, std::vector<Edge> edges);
};

// Mutual/one-sided k-nearest-neighbor weights over the rows of coefs:
// weight 1 when both rows list each other among their k nearest (Euclidean),
// 0.5 when only one does. Distance ties break toward the lower row index;
// a row is never its own neighbor. Requires 1 <= k < rows.
TaskGraph knn_weights(const Eigen::MatrixXd& coefs, int k);

// sum over edges of weight * ||u_{m1} - u_{m2}||_2; equals the mixed
// (2,1)-norm of the stacked weighted difference operator applied to vec(U).
double fused_norm(const Eigen::MatrixXd& U, const TaskGraph& graph);

// Row e of the result is u_{m1} - u_{m2} for edge e = (m1, m2).
Eigen::MatrixXd apply_incidence(const Eigen::MatrixXd& U, const TaskGraph& graph);

// Exact adjoint of apply_incidence: scatters +f_e to m1 and -f_e to m2.
Eigen::MatrixXd apply_incidence_transpose(const Eigen::MatrixXd& F, const TaskGraph& graph);

// FISTA step size 1 / (lambda1 + 2 max_i (A_E^T A_E)_{ii}).
double lipschitz_step(const TaskGraph& graph, double lambda1);

// Edge-list CSV (header m1,m2,weight; 1-based task indices).
void write_edge_csv(std::ostream& out, const TaskGraph& graph);

}  // namespace mtlrrc
