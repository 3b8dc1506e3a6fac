#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "wzsentinel/geometry.hpp"
#include "wzsentinel/predict.hpp"

namespace wz {

inline constexpr double kDefaultDistThreshold = 7.0;  // m
inline constexpr double kDefaultProbThreshold = 0.7;

/// Decay constant at which P(dist_threshold) == prob_threshold, so the
/// distance and probability criteria agree: d / ln(1 / p).
double consistent_lambda(double dist_threshold, double prob_threshold);

struct ConflictParams {
  double lambda = consistent_lambda(kDefaultDistThreshold, kDefaultProbThreshold);
  double dist_threshold = kDefaultDistThreshold;
  double prob_threshold = kDefaultProbThreshold;

  /// InvalidLambda for lambda <= 0, InvalidThreshold otherwise.
  void validate() const;
};

/// exp(-d / lambda). InvalidLambda for lambda <= 0, InvalidArgument for d < 0.
double conflict_probability(double distance_m, double lambda);

struct ConflictRecord {
  int frame_id = 0;
  int horizon_step = 0;  // 1..F
  int track_i = 0;       // track_i < track_j
  int track_j = 0;
  double distance_m = 0.0;
  double probability = 0.0;
  bool is_conflict = false;   // distance_m < dist_threshold
  bool is_high_risk = false;  // probability > prob_threshold
};

struct WarningRecord {
  int issue_frame = 0;
  int track_i = 0;
  int track_j = 0;
  int horizon_step = 0;  // earliest high-risk step
  double distance_m = 0.0;
  double probability = 0.0;
};

ConflictRecord make_conflict_record(int frame_id, int horizon_step, int track_i,
                                    int track_j, double distance_m,
                                    const ConflictParams& params);

struct TrackedBox {
  int track_id = 0;
  OrientedBox box;
};

/// All C(n, 2) unordered pairs of `boxes` at one frame and horizon step,
/// ordered by (track_i, track_j).
std::vector<ConflictRecord> evaluate_pairs(std::span<const TrackedBox> boxes,
                                           int frame_id, int horizon_step,
                                           const ConflictParams& params);

enum class ModePolicy {
  WorstCase,  // minimum distance over all K x K mode combinations
  BestMode,   // each vehicle's most probable mode
  Expected,   // probability-weighted mean of the K x K pair probabilities
};

std::string_view to_string(ModePolicy policy);
ModePolicy parse_mode_policy(std::string_view text);

struct WarningReport {
  std::vector<ConflictRecord> conflicts;  // sorted by (frame, k, i, j)
  std::vector<WarningRecord> warnings;    // sorted by (frame, i, j)
};

/// Evaluates every pair at every horizon step of every prediction set and
/// issues one warning per (pair, frame) at the earliest high-risk step.
WarningReport generate_warnings(std::span<const PredictionSet> predictions,
                                const ConflictParams& params,
                                ModePolicy policy = ModePolicy::WorstCase);
WarningReport generate_warnings(const PredictionSet& predictions,
                                const ConflictParams& params,
                                ModePolicy policy = ModePolicy::WorstCase);

inline constexpr std::string_view kConflictCsvHeader =
    "frame_id,horizon_step,track_i,track_j,distance_m,probability,is_conflict,"
    "is_high_risk";
inline constexpr std::string_view kWarningCsvHeader =
    "issue_frame,track_i,track_j,horizon_step,distance_m,probability";

void write_conflicts_csv(std::span<const ConflictRecord> records,
                         std::ostream& out);
void write_warnings_csv(std::span<const WarningRecord> records,
                        std::ostream& out);
std::vector<ConflictRecord> read_conflicts_csv(const std::filesystem::path& path);
std::vector<ConflictRecord> read_conflicts_csv(std::istream& in,
                                               std::string_view source);

}  // namespace wz
