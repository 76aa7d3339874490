#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "mtlrrc/data.hpp"
#include "mtlrrc/metrics.hpp"
#include "mtlrrc/simulate.hpp"
#include "mtlrrc/solver.hpp"
#include "mtlrrc/task_graph.hpp"

namespace mtlrrc {

// One CSV per task: header row, a column named `y`, remaining columns are
// features. Numbers are written in shortest round-trip form, so a dump
// followed by ingest reproduces the matrices exactly.
void write_task_csv(const std::string& path, const TaskDataset& task);

// Writes task_001.csv ... plus manifest.json (family + file list).
void write_dataset(const std::string& dir, const MultiTaskData& data);

// Reads a task directory. With a manifest.json the family and file list
// come from it; otherwise every *.csv in the directory (sorted) is a
// Gaussian task. All tasks must share the feature schema; violations are
// reported with the offending file and column.
MultiTaskData ingest(const std::string& data_dir);

// Matrix CSV with header task,feature_1..feature_p (1-based task ids).
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M);

std::string fit_result_to_json(const FitResult& result);
void write_fit_result_json(const std::string& path, const FitResult& result);

std::string ground_truth_to_json(const GroundTruth& truth);
void write_ground_truth_json(const std::string& path, const GroundTruth& truth);

std::string standardize_stats_to_json(const StandardizeStats& stats);

std::string metric_report_to_json(const MetricReport& report);

// One row per (method, kappa, replicate); absent metrics are empty fields.
std::string metric_reports_to_csv(const std::vector<MetricReport>& rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace mtlrrc
