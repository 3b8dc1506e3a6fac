#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wzsentinel/geometry.hpp"
#include "wzsentinel/lanelet_map.hpp"
#include "wzsentinel/trajdata.hpp"

namespace wz {

using Trajectory = std::vector<Vec2>;

struct Anchor {
  Vec2 position;
  double heading = 0.0;
};

/// One vehicle's K-mode forecast. `modes` is K x F positions.
struct PredictedAgent {
  int track_id = 0;
  double length = 0.0;
  double width = 0.0;
  Vec2 origin;                 // last observed position
  double origin_heading = 0.0;  // last observed yaw
  std::vector<Trajectory> modes;
  std::vector<double> mode_probs;
  Anchor anchor;

  /// Heading at each step of `mode`, from the direction of travel. Steps
  /// without motion inherit the previous heading (origin heading first).
  std::vector<double> mode_headings(std::size_t mode) const;
  /// Index of the highest-probability mode, lowest index on ties.
  std::size_t most_probable_mode() const;
};

/// Predictions issued at one frame for every vehicle of a window, shaped
/// [N, K, F, 2].
struct PredictionSet {
  int case_id = 0;
  int issue_frame = 0;
  int num_modes = 0;  // K
  int horizon = 0;    // F
  double dt = kFrameDt;
  std::vector<PredictedAgent> agents;  // ascending track_id

  /// Throws InvalidShape on any shape, probability or anchor violation.
  void validate() const;
  const PredictedAgent* find(int track_id) const;
  /// Recomputes every anchor; call after editing modes or origins.
  void refresh_anchors();
};

/// Mode-0 position at index F/2 and the direction of travel there.
/// HorizonTooShort for F < 2.
Anchor propose_anchor(std::span<const Trajectory> modes,
                      double fallback_heading = 0.0);

struct PredictorConfig {
  int modes = 6;
  int horizon = 30;
  double dt = kFrameDt;

  double yaw_rate_epsilon = 1e-4;   // rad/s; below this CTRV rolls out straight
  double comfortable_decel = 2.0;   // m/s^2
  double comfortable_accel = 1.0;   // m/s^2
  double merge_duration = 3.0;      // s
  double softmax_temperature = 1.0;
  double closure_pressure = 100.0;  // m, scales 1/(distance to taper + 10 m)
  double closure_offset = 10.0;     // m

  void validate() const;
};

enum class PredictorKind { ConstantVelocity, Ctrv, Maneuver };

std::string_view to_string(PredictorKind kind);
PredictorKind parse_predictor_kind(std::string_view text);

/// Least-squares slope of the unwrapped yaw over the history, rad/s.
double estimate_yaw_rate(std::span<const TrackPoint> history, double dt);

/// Closed-form constant turn rate and velocity rollout for steps 1..F.
/// Falls back to a straight line for |omega| < epsilon.
Trajectory ctrv_rollout(Vec2 start, double speed, double heading,
                        double omega, int steps, double dt,
                        double epsilon = 1e-4);

PredictionSet predict_cv(const ObservationWindow& window,
                         const PredictorConfig& config);
PredictionSet predict_ctrv(const ObservationWindow& window,
                           const PredictorConfig& config);
PredictionSet predict_maneuver(const ObservationWindow& window,
                               const LaneletMap& map,
                               const PredictorConfig& config);

/// Dispatch on `kind`; `map` is required for the maneuver predictor.
PredictionSet predict(PredictorKind kind, const ObservationWindow& window,
                      const LaneletMap* map, const PredictorConfig& config);

/// Softmax over negative costs at `temperature`.
std::vector<double> softmax_probabilities(std::span<const double> costs,
                                          double temperature);

/// Maneuver hypotheses in their candidate order.
enum class Maneuver {
  KeepSpeed,
  KeepDecelerate,
  KeepAccelerate,
  MergeLeft,
  MergeRight,
  Ctrv,
};

std::string_view to_string(Maneuver maneuver);

struct ManeuverHypothesis {
  Maneuver maneuver = Maneuver::KeepSpeed;
  Trajectory positions;
  double cost = 0.0;
  double probability = 0.0;
};

/// All feasible hypotheses for one vehicle with costs and probabilities,
/// before truncation to K modes. Exposed for diagnostics and tests.
std::vector<ManeuverHypothesis> maneuver_hypotheses(const WindowAgent& agent,
                                                    const LaneletMap& map,
                                                    const PredictorConfig& config);

/// Prediction dump: `track_id,mode,step,x,y,prob`, steps 1..F.
void write_prediction_csv(const PredictionSet& set, std::ostream& out);
/// Reads a dump back. Per-vehicle metadata the dump does not carry (origin,
/// dimensions) is left zeroed for the caller to fill.
PredictionSet read_prediction_csv(std::istream& in, std::string_view source);

}  // namespace wz
