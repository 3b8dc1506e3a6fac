#pragma once

#include <map>
#include <span>
#include <vector>

#include "wzsentinel/geometry.hpp"
#include "wzsentinel/predict.hpp"
#include "wzsentinel/trajdata.hpp"

namespace wz {

/// Mean L2 displacement over the horizon. LengthMismatch when the lengths
/// differ or are zero.
double ade(std::span<const Vec2> pred, std::span<const Vec2> truth);
/// L2 displacement at the final step.
double fde(std::span<const Vec2> pred, std::span<const Vec2> truth);

/// Joint metrics apply one mode index to every vehicle of a scene at once;
/// the min_* fields are the best such index. `ade`/`fde` are the marginal
/// counterparts: each vehicle's own best mode, averaged over vehicles.
struct MetricReport {
  double ade = 0.0;
  double fde = 0.0;
  std::vector<double> joint_ade_per_mode;
  std::vector<double> joint_fde_per_mode;
  double min_joint_ade = 0.0;
  double min_joint_fde = 0.0;
  int n_agents = 0;
  int n_windows = 0;
};

using TruthMap = std::map<int, std::vector<Vec2>>;

/// Future positions of every agent in the window, keyed by track id.
TruthMap truth_from_window(const ObservationWindow& window);

/// ModeCountMismatch when agents disagree on K or F (or truth length differs
/// from F); VehicleMismatch when truth does not cover the predicted agents.
MetricReport joint_metrics(const PredictionSet& preds, const TruthMap& truth);

/// Unweighted mean over reports. Per-mode vectors are averaged element-wise
/// and min_joint_* is the mean of the per-report minima.
MetricReport aggregate_reports(std::span<const MetricReport> reports);

}  // namespace wz
