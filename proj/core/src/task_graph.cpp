#include "mtlrrc/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "mtlrrc/util.hpp"

namespace mtlrrc {

std::vector<int> TaskGraph::degrees() const {
  std::vector<int> deg(n_tasks, 0);
  for (const auto& e : edges) {
    ++deg[e.m1];
    ++deg[e.m2];
  }
  return deg;
}

TaskGraph TaskGraph::from_edges(int n_tasks, std::vector<Edge> edges) {
  for (auto& e : edges) {
    if (e.m1 == e.m2) throw std::invalid_argument("task graph: self-loop");
    if (e.m1 > e.m2) std::swap(e.m1, e.m2);
    if (e.m1 < 0 || e.m2 >= n_tasks) throw std::invalid_argument("task graph: edge out of range");
    if (!(e.weight > 0.0)) throw std::invalid_argument("task graph: weights must be > 0");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.m1, a.m2) < std::pair(b.m1, b.m2);
  });
  for (size_t i = 1; i < edges.size(); ++i) {
    if (edges[i - 1].m1 == edges[i].m1 && edges[i - 1].m2 == edges[i].m2) {
      throw std::invalid_argument("task graph: duplicate edge");
    }
  }
  TaskGraph g;
  g.n_tasks = n_tasks;
  g.edges = std::move(edges);
  return g;
}

TaskGraph knn_weights(const Eigen::MatrixXd& coefs, int k) {
  const int n = static_cast<int>(coefs.rows());
  if (k < 1 || k >= n) throw std::invalid_argument("knn_weights requires 1 <= k < n_tasks");
  if (!coefs.allFinite()) throw std::invalid_argument("knn_weights: non-finite coefficients");

  // S(m1, m2) = 1 iff row m1 is among the k nearest rows to row m2.
  std::vector<std::vector<char>> is_neighbor_of(n, std::vector<char>(n, 0));
  std::vector<double> dist(n);
  for (int m2 = 0; m2 < n; ++m2) {
    std::vector<int> order;
    order.reserve(n - 1);
    for (int i = 0; i < n; ++i) {
      if (i != m2) order.push_back(i);
    }
    for (int m1 = 0; m1 < n; ++m1) dist[m1] = (coefs.row(m1) - coefs.row(m2)).norm();
    // ties break toward the lower index: the index itself is the tiebreaker
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      return std::pair(dist[a], a) < std::pair(dist[b], b);
    });
    for (int j = 0; j < k; ++j) is_neighbor_of[order[j]][m2] = 1;
  }

  TaskGraph g;
  g.n_tasks = n;
  g.k = k;
  for (int m1 = 0; m1 < n; ++m1) {
    for (int m2 = m1 + 1; m2 < n; ++m2) {
      const double r = 0.5 * (is_neighbor_of[m1][m2] + is_neighbor_of[m2][m1]);
      if (r > 0.0) g.edges.push_back({m1, m2, r});
    }
  }
  return g;
}

double fused_norm(const Eigen::MatrixXd& U, const TaskGraph& graph) {
  if (U.rows() != graph.n_tasks) throw std::invalid_argument("fused_norm: row count != n_tasks");
  double total = 0.0;
  for (const auto& e : graph.edges) {
    total += e.weight * (U.row(e.m1) - U.row(e.m2)).norm();
  }
  return total;
}

Eigen::MatrixXd apply_incidence(const Eigen::MatrixXd& U, const TaskGraph& graph) {
  if (U.rows() != graph.n_tasks) throw std::invalid_argument("apply_incidence: row count != n_tasks");
  Eigen::MatrixXd out(graph.n_edges(), U.cols());
  for (int e = 0; e < graph.n_edges(); ++e) {
    out.row(e) = U.row(graph.edges[e].m1) - U.row(graph.edges[e].m2);
  }
  return out;
}

Eigen::MatrixXd apply_incidence_transpose(const Eigen::MatrixXd& F, const TaskGraph& graph) {
  if (F.rows() != graph.n_edges()) {
    throw std::invalid_argument("apply_incidence_transpose: row count != n_edges");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(graph.n_tasks, F.cols());
  for (int e = 0; e < graph.n_edges(); ++e) {
    out.row(graph.edges[e].m1) += F.row(e);
    out.row(graph.edges[e].m2) -= F.row(e);
  }
  return out;
}

double lipschitz_step(const TaskGraph& graph, double lambda1) {
  if (lambda1 < 0.0) throw std::invalid_argument("lipschitz_step: lambda1 must be >= 0");
  int max_degree = 0;
  for (int d : graph.degrees()) max_degree = std::max(max_degree, d);
  return 1.0 / (lambda1 + 2.0 * max_degree);
}

void write_edge_csv(std::ostream& out, const TaskGraph& graph) {
  out << "m1,m2,weight\n";
  for (const auto& e : graph.edges) {
    out << (e.m1 + 1) << ',' << (e.m2 + 1) << ',' << format_double(e.weight) << '\n';
  }
}

}  // namespace mtlrrc
