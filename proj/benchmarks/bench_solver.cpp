#include <benchmark/benchmark.h>

#include "mtlrrc/glm.hpp"
#include "mtlrrc/simulate.hpp"
#include "mtlrrc/solver.hpp"
#include "mtlrrc/task_graph.hpp"

using namespace mtlrrc;

namespace {

struct Instance {
  MultiTaskData data;
  TaskGraph graph;
  HyperParams hp;
  FitOptions options;
};

Instance make_instance(int n_tasks, int n_features) {
  SimConfig cfg;
  cfg.n_tasks = n_tasks;
  cfg.n_features = n_features;
  cfg.n_clusters = 3;
  cfg.n_samples = 40;
  cfg.kappa = 0.2;
  cfg.regime = OutlierRegime::Structureless;
  cfg.seed = 5;
  Instance inst;
  auto [data, truth] = generate(cfg);
  standardize(data);
  inst.data = std::move(data);
  inst.graph = knn_weights(stl_ridge_coefficients(inst.data, 1e-2), 3);
  inst.hp.lambda1 = 0.5;
  inst.hp.lambda2 = 1.0;
  inst.hp.lambda3 = 10.0;
  inst.hp.penalty_family = PenaltyFamily::GroupSCAD;
  inst.options.tol = 1e-5;
  inst.options.max_outer = 200;
  return inst;
}

}  // namespace

static void FitAdmm(benchmark::State& state) {
  const Instance inst = make_instance(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_admm(inst.data, inst.graph, inst.hp, inst.options));
  }
}
BENCHMARK(FitAdmm)->Args({9, 8})->Args({18, 12})->Args({30, 20})->Unit(benchmark::kMillisecond);

static void FitBcd(benchmark::State& state) {
  Instance inst = make_instance(static_cast<int>(state.range(0)),
                                static_cast<int>(state.range(1)));
  inst.options.bcd_tol = 1e-7;
  inst.options.max_sweeps = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_bcd(inst.data, inst.graph, inst.hp, inst.options));
  }
}
BENCHMARK(FitBcd)->Args({9, 8})->Args({18, 12})->Unit(benchmark::kMillisecond);

static void WStep(benchmark::State& state) {
  const Instance inst = make_instance(30, static_cast<int>(state.range(0)));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(inst.data.n_features());
  for (auto _ : state) {
    for (int m = 0; m < inst.data.n_tasks(); ++m) {
      benchmark::DoNotOptimize(newton_raphson(inst.data.tasks[m], zero, zero, 0.5));
    }
  }
  state.SetItemsProcessed(state.iterations() * inst.data.n_tasks());
}
BENCHMARK(WStep)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
