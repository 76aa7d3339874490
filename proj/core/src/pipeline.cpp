#include "mtlrrc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "mtlrrc/glm.hpp"
#include "mtlrrc/io.hpp"
#include "mtlrrc/util.hpp"

namespace fs = std::filesystem;

namespace mtlrrc {

RunMode run_mode_from_string(const std::string& name) {
  if (name == "fit") return RunMode::Fit;
  if (name == "simulate") return RunMode::Simulate;
  if (name == "bench") return RunMode::Bench;
  throw std::invalid_argument("unknown mode: " + name);
}

std::vector<double> log_spaced(double exp_lo, double exp_hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double e = count == 1 ? exp_lo : exp_lo + (exp_hi - exp_lo) * i / (count - 1);
    out[i] = std::pow(10.0, e);
  }
  return out;
}

Grids Grids::defaults() {
  Grids g;
  g.lambda1 = log_spaced(-2, 1, 7);
  g.lambda2 = log_spaced(-2, 2, 9);
  g.lambda3 = log_spaced(-1, 2, 7);
  return g;
}

double validation_loss(const MultiTaskData& val, const Eigen::VectorXd& w0,
                       const Eigen::MatrixXd& W) {
  double total = 0.0;
  for (int m = 0; m < val.n_tasks(); ++m) {
    const auto& task = val.tasks[m];
    TaskCoef c{w0[m], W.row(m).transpose()};
    if (task.family == Family::Gaussian) {
      total += (task.y - task.X * c.coef).squaredNorm() / task.n();
    } else {
      total += 2.0 * glm_loss(task, c) / task.n();
    }
  }
  return total / val.n_tasks();
}

namespace {

struct LambdaPair {
  double lambda1;
  double lambda2;
};

HyperParams make_hp(const RunConfig& cfg, PenaltyFamily family, double l1, double l2, double l3) {
  HyperParams hp;
  hp.lambda1 = l1;
  hp.lambda2 = l2;
  hp.lambda3 = l3;
  hp.penalty_family = family;
  hp.gamma = cfg.gamma;
  hp.nu = cfg.nu;
  hp.k = cfg.k;
  return hp;
}

}  // namespace

GridSearchResult grid_search(const MultiTaskData& train, const MultiTaskData& val,
                             const RunConfig& cfg, PenaltyFamily family, bool freeze_outliers) {
  if (cfg.grids.lambda1.empty() || cfg.grids.lambda2.empty() || cfg.grids.lambda3.empty()) {
    throw std::invalid_argument("grid_search: empty grid");
  }
  if (val.n_tasks() != train.n_tasks()) {
    throw std::invalid_argument("grid_search: train/val task counts differ");
  }
  for (const auto& t : val.tasks) {
    if (t.n() == 0) throw std::invalid_argument("grid_search: empty validation split");
  }

  GridSearchResult result;
  result.stl_coefs = stl_ridge_coefficients(train, cfg.stl_ridge, cfg.workers);
  result.graph = knn_weights(result.stl_coefs, cfg.k);

  std::vector<double> lambda3_path = freeze_outliers ? std::vector<double>{0.0}
                                                     : cfg.grids.lambda3;
  std::sort(lambda3_path.begin(), lambda3_path.end(), std::greater<>());

  std::vector<LambdaPair> pairs;
  for (double l1 : cfg.grids.lambda1) {
    for (double l2 : cfg.grids.lambda2) pairs.push_back({l1, l2});
  }
  const int path_len = static_cast<int>(lambda3_path.size());
  result.table.resize(pairs.size() * path_len);

  // Walks one (lambda1, lambda2) pair down the lambda3 path with
  // warm-started centroids; stop_at < 0 fills the table, stop_at = i
  // returns the fit at path position i (re-walking keeps the refit
  // identical to the tabled one).
  const auto walk_path = [&](int pair_idx, int stop_at,
                             std::vector<GridPointResult>* table) -> FitResult {
    const LambdaPair pair = pairs[pair_idx];
    FitOptions options = cfg.fit;
    options.n_threads = 1;
    options.freeze_outliers = freeze_outliers;
    options.u_init = result.stl_coefs;
    FitResult fit;
    for (int i = 0; i < path_len; ++i) {
      const HyperParams hp =
          make_hp(cfg, family, pair.lambda1, pair.lambda2, lambda3_path[i]);
      GridPointResult point;
      point.hp = hp;
      point.frozen_outliers = freeze_outliers;
      try {
        fit = fit_admm(train, result.graph, hp, options);
        point.validation_loss = validation_loss(val, fit.params.w0, fit.params.W);
        point.ok = true;
        options.u_init = fit.params.U;
      } catch (const std::exception& err) {
        point.error = err.what();
      }
      if (table) (*table)[pair_idx * path_len + i] = point;
      if (stop_at == i) return fit;
    }
    return fit;
  };

  parallel_for(static_cast<int>(pairs.size()), cfg.workers,
               [&](int pair_idx) { walk_path(pair_idx, -1, &result.table); });

  int best_index = -1;
  for (size_t i = 0; i < result.table.size(); ++i) {
    const auto& point = result.table[i];
    if (!point.ok) continue;
    if (best_index < 0) {
      best_index = static_cast<int>(i);
      continue;
    }
    const auto& best = result.table[best_index];
    const auto key = [](const GridPointResult& g) {
      return std::tuple(g.validation_loss, g.hp.lambda1, g.hp.lambda2, g.hp.lambda3);
    };
    if (key(point) < key(best)) best_index = static_cast<int>(i);
  }
  if (best_index < 0) {
    std::string detail;
    for (const auto& point : result.table) {
      if (!point.error.empty()) {
        detail = point.error;
        break;
      }
    }
    throw std::runtime_error("grid_search: every grid point failed (first error: " + detail + ")");
  }

  result.best = result.table[best_index].hp;
  result.best_fit = walk_path(best_index / path_len, best_index % path_len, nullptr);
  return result;
}

namespace {

struct ReplicateContext {
  SplitResult splits;
  GroundTruth truth;
  StandardizeStats stats;
  std::vector<Eigen::VectorXd> y_star;  // noiseless centered test responses
  std::vector<Eigen::MatrixXd> x_test;  // standardized test designs
};

ReplicateContext prepare_replicate(const RunConfig& cfg, int replicate) {
  SimConfig sim = cfg.sim;
  sim.seed = cfg.seed + static_cast<std::uint64_t>(replicate);
  auto [data, truth] = generate(sim);

  SplitCounts counts = cfg.split_counts;
  if (counts.train < 0) {
    counts.train = sim.n_samples / 4;
    counts.val = sim.n_samples / 2;
    counts.test = sim.n_samples - counts.train - counts.val;
  }

  ReplicateContext ctx;
  ctx.truth = std::move(truth);
  ctx.splits = split(data, counts, sim.seed);
  for (int m = 0; m < data.n_tasks(); ++m) {
    ctx.y_star.push_back(ctx.splits.test.tasks[m].X * ctx.truth.W_true.row(m).transpose());
  }
  ctx.stats = standardize(ctx.splits.train);
  apply_standardization(ctx.splits.val, ctx.stats);
  apply_standardization(ctx.splits.test, ctx.stats);
  for (int m = 0; m < data.n_tasks(); ++m) {
    ctx.y_star[m].array() -= ctx.stats.y_mean[m];
    ctx.x_test.push_back(ctx.splits.test.tasks[m].X);
  }
  return ctx;
}

MetricReport score_fit(const ReplicateContext& ctx, const Eigen::MatrixXd& W_std,
                       const Eigen::MatrixXd& O_hat, bool outlier_capable) {
  MetricReport report;
  report.per_task_nmse = nmse_per_task(ctx.y_star, ctx.x_test, W_std);
  report.nmse = std::accumulate(report.per_task_nmse.begin(), report.per_task_nmse.end(), 0.0) /
                report.per_task_nmse.size();
  report.rmse = rmse(ctx.truth.W_true, unstandardize_coefficients(W_std, ctx.stats));
  if (outlier_capable) {
    const OutlierRates rates = outlier_rates(ctx.truth.is_outlier, O_hat);
    report.tpr = rates.tpr;
    report.fpr = rates.fpr;
  }
  return report;
}

MetricReport run_method(const RunConfig& cfg, const ReplicateContext& ctx,
                        const std::string& method) {
  RunConfig inner = cfg;
  inner.workers = 1;
  const auto& train = ctx.splits.train;
  const auto& val = ctx.splits.val;
  const int T = train.n_tasks();

  if (method == "mtlrrc_gl" || method == "mtlrrc_gs" || method == "mtlrrc_gm" ||
      method == "mtlrrc_tukey") {
    PenaltyFamily family = PenaltyFamily::GroupLasso;
    if (method == "mtlrrc_gs") family = PenaltyFamily::GroupSCAD;
    if (method == "mtlrrc_gm") family = PenaltyFamily::GroupMCP;
    if (method == "mtlrrc_tukey") family = PenaltyFamily::MultiTukey;
    inner.gamma = std::numeric_limits<double>::quiet_NaN();
    const GridSearchResult gs = grid_search(train, val, inner, family, false);
    return score_fit(ctx, gs.best_fit.params.W, gs.best_fit.params.O, true);
  }
  if (method == "mtlcvx") {
    const GridSearchResult gs = grid_search(train, val, inner, PenaltyFamily::GroupLasso, true);
    return score_fit(ctx, gs.best_fit.params.W, gs.best_fit.params.O, false);
  }
  if (method == "hmtlk") {
    const Eigen::MatrixXd stl = stl_ridge_coefficients(train, cfg.stl_ridge);
    const std::vector<int> detected = hmtlk_detect(stl);
    std::vector<char> is_detected(T, 0);
    for (int m : detected) is_detected[m] = 1;
    std::vector<int> kept;
    for (int m = 0; m < T; ++m) {
      if (!is_detected[m]) kept.push_back(m);
    }

    // Detected tasks keep their single-task coefficients; the rest are fit
    // jointly by the convex-clustering model.
    Eigen::MatrixXd W_std = stl;
    if (static_cast<int>(kept.size()) >= 3) {
      MultiTaskData sub_train, sub_val;
      for (int m : kept) {
        sub_train.tasks.push_back(train.tasks[m]);
        sub_val.tasks.push_back(val.tasks[m]);
      }
      inner.k = std::min(cfg.k, static_cast<int>(kept.size()) - 1);
      const GridSearchResult gs =
          grid_search(sub_train, sub_val, inner, PenaltyFamily::GroupLasso, true);
      for (size_t i = 0; i < kept.size(); ++i) {
        W_std.row(kept[i]) = gs.best_fit.params.W.row(static_cast<int>(i));
      }
    }
    Eigen::MatrixXd indicator = Eigen::MatrixXd::Zero(T, 1);
    for (int m : detected) indicator(m, 0) = 1.0;
    MetricReport report = score_fit(ctx, W_std, indicator, true);
    return report;
  }
  throw std::invalid_argument("unknown bench method: " + method);
}

std::string summarize(const std::vector<MetricReport>& rows,
                      const std::vector<std::string>& methods, double kappa) {
  const auto mean_sd = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair(std::string(), std::string());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(sq / (v.size() - 1)) : 0.0;
    return std::pair(format_double(mean), format_double(sd));
  };
  std::string out =
      "method,kappa,nmse_mean,nmse_sd,rmse_mean,rmse_sd,tpr_mean,tpr_sd,fpr_mean,fpr_sd\n";
  for (const auto& method : methods) {
    std::vector<double> nmse_v, rmse_v, tpr_v, fpr_v;
    for (const auto& r : rows) {
      if (r.method != method) continue;
      if (r.nmse) nmse_v.push_back(*r.nmse);
      if (r.rmse) rmse_v.push_back(*r.rmse);
      if (r.tpr) tpr_v.push_back(*r.tpr);
      if (r.fpr) fpr_v.push_back(*r.fpr);
    }
    const auto [nm, ns] = mean_sd(nmse_v);
    const auto [rm, rs] = mean_sd(rmse_v);
    const auto [tm, ts] = mean_sd(tpr_v);
    const auto [fm, fs] = mean_sd(fpr_v);
    out += method + ',' + format_double(kappa) + ',' + nm + ',' + ns + ',' + rm + ',' + rs + ',' +
           tm + ',' + ts + ',' + fm + ',' + fs + '\n';
  }
  return out;
}

}  // namespace

BenchOutput bench(const RunConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("bench: replicates must be >= 1");
  const int n_methods = static_cast<int>(cfg.methods.size());
  BenchOutput out;
  out.rows.resize(static_cast<size_t>(cfg.replicates) * n_methods);

  parallel_for(cfg.replicates, cfg.workers, [&](int r) {
    const ReplicateContext ctx = prepare_replicate(cfg, r);
    for (int mi = 0; mi < n_methods; ++mi) {
      MetricReport report = run_method(cfg, ctx, cfg.methods[mi]);
      report.method = cfg.methods[mi];
      report.kappa = cfg.sim.kappa;
      report.replicate = r + 1;
      out.rows[static_cast<size_t>(r) * n_methods + mi] = std::move(report);
    }
  });

  out.replicates_csv = metric_reports_to_csv(out.rows);
  out.summary_csv = summarize(out.rows, cfg.methods, cfg.sim.kappa);
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    write_text_file((fs::path(cfg.out_dir) / "replicates.csv").string(), out.replicates_csv);
    write_text_file((fs::path(cfg.out_dir) / "summary.csv").string(), out.summary_csv);
  }
  return out;
}

void run_fit(const RunConfig& cfg) {
  if (cfg.data_dir.empty()) throw std::invalid_argument("fit mode requires --data-dir");
  if (cfg.out_dir.empty()) throw std::invalid_argument("fit mode requires --out");
  MultiTaskData data = ingest(cfg.data_dir);
  SplitResult splits = split(data, cfg.train_ratio, cfg.val_ratio, cfg.test_ratio, cfg.seed);
  const StandardizeStats stats = standardize(splits.train);
  apply_standardization(splits.val, stats);
  apply_standardization(splits.test, stats);

  const GridSearchResult gs = grid_search(splits.train, splits.val, cfg, cfg.penalty, false);

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  write_fit_result_json((out / "fit.json").string(), gs.best_fit);
  write_text_file((out / "standardization.json").string(), standardize_stats_to_json(stats));
  {
    std::ostringstream graph_csv;
    write_edge_csv(graph_csv, gs.graph);
    write_text_file((out / "graph.csv").string(), graph_csv.str());
  }
  {
    std::string grid_csv = "lambda1,lambda2,lambda3,frozen_outliers,validation_loss,ok,error\n";
    for (const auto& point : gs.table) {
      grid_csv += format_double(point.hp.lambda1) + ',' + format_double(point.hp.lambda2) + ',' +
                  format_double(point.hp.lambda3) + ',' + (point.frozen_outliers ? "1" : "0") +
                  ',' + (point.ok ? format_double(point.validation_loss) : std::string()) + ',' +
                  (point.ok ? "1" : "0") + ',' + point.error + '\n';
    }
    write_text_file((out / "grid.csv").string(), grid_csv);
  }

  // Held-out metrics on the test split: prediction error for Gaussian
  // responses, ranking accuracy for Bernoulli ones.
  MetricReport report;
  report.method = std::string("mtlrrc_") + to_string(cfg.penalty);
  if (data.family() == Family::Gaussian) {
    std::vector<Eigen::VectorXd> y_test;
    std::vector<Eigen::MatrixXd> x_test;
    for (const auto& task : splits.test.tasks) {
      y_test.push_back(task.y);
      x_test.push_back(task.X);
    }
    report.per_task_nmse = nmse_per_task(y_test, x_test, gs.best_fit.params.W);
    report.nmse =
        std::accumulate(report.per_task_nmse.begin(), report.per_task_nmse.end(), 0.0) /
        report.per_task_nmse.size();
  } else {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int m = 0; m < splits.test.n_tasks(); ++m) {
      const auto& task = splits.test.tasks[m];
      const Eigen::VectorXd eta =
          (task.X * gs.best_fit.params.W.row(m).transpose()).array() + gs.best_fit.params.w0[m];
      for (int i = 0; i < task.n(); ++i) {
        scores.push_back(eta[i]);
        labels.push_back(static_cast<int>(task.y[i]));
      }
    }
    report.auc = auc(scores, labels);
  }
  write_text_file((out / "metrics.json").string(), metric_report_to_json(report));
}

void run_simulate(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw std::invalid_argument("simulate mode requires --out");
  const auto [data, truth] = generate(cfg.sim);
  write_dataset(cfg.out_dir, data);
  write_ground_truth_json((fs::path(cfg.out_dir) / "ground_truth.json").string(), truth);
}

}  // namespace mtlrrc
