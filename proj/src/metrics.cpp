#include "wzsentinel/metrics.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "wzsentinel/error.hpp"

namespace wz {
namespace {

void check_lengths(std::span<const Vec2> pred, std::span<const Vec2> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw Error(ErrorCode::LengthMismatch,
                "prediction has " + std::to_string(pred.size()) +
                    " steps, truth has " + std::to_string(truth.size()));
  }
}

}  // namespace

double ade(std::span<const Vec2> pred, std::span<const Vec2> truth) {
  check_lengths(pred, truth);
  double sum = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) sum += distance(pred[t], truth[t]);
  return sum / static_cast<double>(pred.size());
}

double fde(std::span<const Vec2> pred, std::span<const Vec2> truth) {
  check_lengths(pred, truth);
  return distance(pred.back(), truth.back());
}

TruthMap truth_from_window(const ObservationWindow& window) {
  TruthMap out;
  for (const WindowAgent& a : window.agents) {
    auto& v = out[a.track_id];
    for (const TrackPoint& p : a.future_truth) v.push_back(p.position());
  }
  return out;
}

MetricReport joint_metrics(const PredictionSet& preds, const TruthMap& truth) {
  const auto k = static_cast<std::size_t>(preds.num_modes);
  const auto f = static_cast<std::size_t>(preds.horizon);
  if (k == 0 || f == 0) {
    throw Error(ErrorCode::ModeCountMismatch, "K and F must be >= 1");
  }
  if (preds.agents.empty()) {
    throw Error(ErrorCode::VehicleMismatch, "prediction set has no vehicles");
  }
  for (const PredictedAgent& a : preds.agents) {
    if (a.modes.size() != k) {
      throw Error(ErrorCode::ModeCountMismatch,
                  "track " + std::to_string(a.track_id) + " has " +
                      std::to_string(a.modes.size()) + " modes, expected " +
                      std::to_string(k));
    }
    for (const Trajectory& m : a.modes) {
      if (m.size() != f) {
        throw Error(ErrorCode::ModeCountMismatch,
                    "track " + std::to_string(a.track_id) +
                        " has a mode of length " + std::to_string(m.size()));
      }
    }
    const auto it = truth.find(a.track_id);
    if (it == truth.end()) {
      throw Error(ErrorCode::VehicleMismatch,
                  "no ground truth for track " + std::to_string(a.track_id));
    }
    if (it->second.size() != f) {
      throw Error(ErrorCode::ModeCountMismatch,
                  "ground truth for track " + std::to_string(a.track_id) +
                      " has " + std::to_string(it->second.size()) +
                      " steps, expected " + std::to_string(f));
    }
  }

  MetricReport r;
  r.n_agents = static_cast<int>(preds.agents.size());
  r.n_windows = 1;
  r.joint_ade_per_mode.assign(k, 0.0);
  r.joint_fde_per_mode.assign(k, 0.0);
  double marginal_ade = 0.0;
  double marginal_fde = 0.0;
  for (const PredictedAgent& a : preds.agents) {
    const auto& gt = truth.at(a.track_id);
    double best_ade = std::numeric_limits<double>::infinity();
    double best_fde = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < k; ++m) {
      const double e_ade = ade(a.modes[m], gt);
      const double e_fde = fde(a.modes[m], gt);
      r.joint_ade_per_mode[m] += e_ade;
      r.joint_fde_per_mode[m] += e_fde;
      best_ade = std::min(best_ade, e_ade);
      best_fde = std::min(best_fde, e_fde);
    }
    marginal_ade += best_ade;
    marginal_fde += best_fde;
  }
  const double n = static_cast<double>(preds.agents.size());
  for (std::size_t m = 0; m < k; ++m) {
    r.joint_ade_per_mode[m] /= n;
    r.joint_fde_per_mode[m] /= n;
  }
  r.ade = marginal_ade / n;
  r.fde = marginal_fde / n;
  r.min_joint_ade = *std::min_element(r.joint_ade_per_mode.begin(),
                                      r.joint_ade_per_mode.end());
  r.min_joint_fde = *std::min_element(r.joint_fde_per_mode.begin(),
                                      r.joint_fde_per_mode.end());
  return r;
}

MetricReport aggregate_reports(std::span<const MetricReport> reports) {
  MetricReport out;
  if (reports.empty()) return out;
  const std::size_t k = reports.front().joint_ade_per_mode.size();
  out.joint_ade_per_mode.assign(k, 0.0);
  out.joint_fde_per_mode.assign(k, 0.0);
  for (const MetricReport& r : reports) {
    if (r.joint_ade_per_mode.size() != k) {
      throw Error(ErrorCode::ModeCountMismatch,
                  "cannot aggregate reports with different mode counts");
    }
    out.ade += r.ade;
    out.fde += r.fde;
    out.min_joint_ade += r.min_joint_ade;
    out.min_joint_fde += r.min_joint_fde;
    for (std::size_t m = 0; m < k; ++m) {
      out.joint_ade_per_mode[m] += r.joint_ade_per_mode[m];
      out.joint_fde_per_mode[m] += r.joint_fde_per_mode[m];
    }
    out.n_agents += r.n_agents;
    out.n_windows += r.n_windows;
  }
  const double n = static_cast<double>(reports.size());
  out.ade /= n;
  out.fde /= n;
  out.min_joint_ade /= n;
  out.min_joint_fde /= n;
  for (std::size_t m = 0; m < k; ++m) {
    out.joint_ade_per_mode[m] /= n;
    out.joint_fde_per_mode[m] /= n;
  }
  return out;
}

}  // namespace wz
