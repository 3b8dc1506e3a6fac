#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wzsentinel/conflict.hpp"
#include "wzsentinel/predict.hpp"
#include "wzsentinel/trajdata.hpp"

namespace wz {

struct ScatterOptions {
  std::string title = "Conflict probability vs distance";
  double dist_threshold = kDefaultDistThreshold;
  double prob_threshold = kDefaultProbThreshold;
};

/// One <circle> per record; dashed guide lines at both thresholds.
std::string probability_scatter_svg(std::span<const ConflictRecord> records,
                                    const ScatterOptions& options = {});

/// Records with distance strictly below the distance threshold.
std::vector<ConflictRecord> below_threshold(std::span<const ConflictRecord> records,
                                            double dist_threshold);

/// Records of a single pair (order of i and j does not matter).
std::vector<ConflictRecord> pair_records(std::span<const ConflictRecord> records,
                                         int track_i, int track_j);

/// Predicted modes (stroke opacity scaled by probability) over the observed
/// history and ground-truth future when a case is given.
std::string trajectory_overlay_svg(const PredictionSet& predictions,
                                   const ScenarioCase* truth = nullptr,
                                   int history_len = 0);

}  // namespace wz
