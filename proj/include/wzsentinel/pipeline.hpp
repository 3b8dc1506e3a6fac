#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wzsentinel/error.hpp"
#include "wzsentinel/lanelet_map.hpp"
#include "wzsentinel/metrics.hpp"
#include "wzsentinel/predict.hpp"

namespace wz {

inline constexpr const char* kPredictionIndexFile = "predictions_index.json";
inline constexpr const char* kRunManifestFile = "run_manifest.jsonl";

/// Exit status for a library error: 1 usage/config, 2 I/O, 3 parse,
/// 4 consistency.
int exit_code_for(ErrorCode code);

/// `trajectory_data_case_<id>.csv` files in `dir`, ordered by case id.
std::vector<std::filesystem::path> list_case_files(const std::filesystem::path& dir);

std::string prediction_file_name(int case_id, int issue_frame);

struct PredictRunOptions {
  PredictorKind kind = PredictorKind::ConstantVelocity;
  PredictorConfig config;
  int history_len = 10;
  unsigned threads = 0;
};

/// Predicts every window of every case in `cases_dir` and writes one CSV
/// per (case, window) plus the prediction index. Returns the file names.
std::vector<std::string> predict_directory(const std::filesystem::path& cases_dir,
                                           const LaneletMap* map,
                                           const PredictRunOptions& options,
                                           const std::filesystem::path& out_dir);

struct PredictionDir {
  std::string predictor;
  int history_len = 0;
  std::vector<PredictionSet> sets;  // index order
};

/// Reads the prediction index and every CSV it lists, restoring origins and
/// dimensions from the index.
PredictionDir load_prediction_dir(const std::filesystem::path& dir);

struct CaseMetrics {
  int case_id = 0;
  MetricReport report;
};

/// Joint metrics for every prediction set against the ground-truth cases in
/// `gt_dir`, averaged per case.
std::vector<CaseMetrics> evaluate_directory(const std::filesystem::path& preds_dir,
                                            const std::filesystem::path& gt_dir);

/// One row per case plus an `ALL` row holding the mean of the case rows.
void write_metrics_csv(std::span<const CaseMetrics> rows, std::ostream& out);

/// Full command line entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wz
