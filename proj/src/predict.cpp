#include "wzsentinel/predict.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include "wzsentinel/error.hpp"

namespace wz {
namespace {

constexpr double kMinMotion = 1e-6;

// Direction of travel at step i; walks back to the last step that moved and
// falls back to `fallback` when nothing moved.
double heading_at_step(const Trajectory& traj, std::size_t i, Vec2 origin,
                       double fallback) {
  for (std::size_t k = i + 1; k-- > 0;) {
    const Vec2 prev = k == 0 ? origin : traj[k - 1];
    const Vec2 d = traj[k] - prev;
    if (norm(d) > kMinMotion) return std::atan2(d.y, d.x);
  }
  return fallback;
}

Anchor agent_anchor(const PredictedAgent& agent, int horizon) {
  const auto idx = static_cast<std::size_t>(horizon / 2);
  const Trajectory& mode0 = agent.modes.front();
  return {mode0[idx],
          heading_at_step(mode0, idx, agent.origin, agent.origin_heading)};
}

PredictedAgent make_agent(const WindowAgent& source) {
  PredictedAgent agent;
  agent.track_id = source.track_id;
  agent.length = source.length;
  agent.width = source.width;
  agent.origin = source.last_observed().position();
  agent.origin_heading = source.last_observed().psi_rad;
  return agent;
}

PredictionSet make_set(const ObservationWindow& window,
                       const PredictorConfig& config) {
  config.validate();
  PredictionSet set;
  set.case_id = window.case_id;
  set.issue_frame = window.issue_frame();
  set.num_modes = config.modes;
  set.horizon = config.horizon;
  set.dt = config.dt;
  return set;
}

void fill_uniform(PredictedAgent& agent, const Trajectory& traj, int modes,
                  int horizon) {
  agent.modes.assign(static_cast<std::size_t>(modes), traj);
  agent.mode_probs.assign(static_cast<std::size_t>(modes), 1.0 / modes);
  agent.anchor = agent_anchor(agent, horizon);
}

void require_history(const WindowAgent& agent, std::size_t minimum) {
  if (agent.history.size() < minimum) {
    throw Error(ErrorCode::EmptyHistory,
                "track " + std::to_string(agent.track_id) + " needs at least " +
                    std::to_string(minimum) + " history points");
  }
}

Trajectory straight_rollout(Vec2 start, Vec2 velocity, int steps, double dt) {
  Trajectory out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int t = 1; t <= steps; ++t) {
    out.push_back(start + (t * dt) * velocity);
  }
  return out;
}

double least_squares_slope(std::span<const double> values, double dt) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean_t = 0.5 * static_cast<double>(n - 1);
  const double mean_v =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt_i = static_cast<double>(i) - mean_t;
    num += dt_i * (values[i] - mean_v);
    den += dt_i * dt_i;
  }
  return num / den / dt;
}

Vec2 left_of(double heading) { return {-std::sin(heading), std::cos(heading)}; }
Vec2 ahead_of(double heading) { return {std::cos(heading), std::sin(heading)}; }

}  // namespace

// ------------------------------------------------------------ contract

std::vector<double> PredictedAgent::mode_headings(std::size_t mode) const {
  const Trajectory& traj = modes.at(mode);
  std::vector<double> out(traj.size());
  double current = origin_heading;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec2 prev = i == 0 ? origin : traj[i - 1];
    const Vec2 d = traj[i] - prev;
    if (norm(d) > kMinMotion) current = std::atan2(d.y, d.x);
    out[i] = current;
  }
  return out;
}

std::size_t PredictedAgent::most_probable_mode() const {
  return static_cast<std::size_t>(
      std::max_element(mode_probs.begin(), mode_probs.end()) -
      mode_probs.begin());
}

void PredictionSet::refresh_anchors() {
  for (PredictedAgent& a : agents) {
    if (!a.modes.empty() && !a.modes.front().empty()) a.anchor = agent_anchor(a, horizon);
  }
}

const PredictedAgent* PredictionSet::find(int track_id) const {
  for (const auto& a : agents) {
    if (a.track_id == track_id) return &a;
  }
  return nullptr;
}

void PredictionSet::validate() const {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::InvalidShape,
                "case " + std::to_string(case_id) + " frame " +
                    std::to_string(issue_frame) + ": " + what);
  };
  if (num_modes < 1 || horizon < 1) fail("K and F must be >= 1");
  if (!(dt > 0.0)) fail("dt must be positive");
  int prev_id = 0;
  for (const PredictedAgent& a : agents) {
    const std::string who = "track " + std::to_string(a.track_id);
    if (a.track_id <= prev_id) fail("agents must have ascending unique track ids");
    prev_id = a.track_id;
    if (a.modes.size() != static_cast<std::size_t>(num_modes)) {
      fail(who + " has " + std::to_string(a.modes.size()) + " modes, expected " +
           std::to_string(num_modes));
    }
    for (const Trajectory& m : a.modes) {
      if (m.size() != static_cast<std::size_t>(horizon)) {
        fail(who + " has a mode with " + std::to_string(m.size()) +
             " steps, expected " + std::to_string(horizon));
      }
    }
    if (a.mode_probs.size() != static_cast<std::size_t>(num_modes)) {
      fail(who + " mode probability count mismatch");
    }
    double sum = 0.0;
    for (double p : a.mode_probs) {
      if (!(p >= 0.0)) fail(who + " has a negative mode probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail(who + " mode probabilities do not sum to 1");
    const Anchor expected = agent_anchor(a, horizon);
    if (!(expected.position == a.anchor.position) ||
        std::abs(normalize_angle(expected.heading - a.anchor.heading)) > 1e-9) {
      fail(who + " anchor is not mode 0 at step F/2");
    }
  }
}

Anchor propose_anchor(std::span<const Trajectory> modes,
                      double fallback_heading) {
  if (modes.empty()) {
    throw Error(ErrorCode::InvalidShape, "no modes to anchor");
  }
  const Trajectory& mode0 = modes.front();
  if (mode0.size() < 2) {
    throw Error(ErrorCode::HorizonTooShort,
                "anchor selection needs F >= 2, got F=" +
                    std::to_string(mode0.size()));
  }
  const std::size_t idx = mode0.size() / 2;
  return {mode0[idx], heading_at_step(mode0, idx, mode0.front(), fallback_heading)};
}

void PredictorConfig::validate() const {
  if (modes < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "F must be >= 1");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (!(comfortable_decel > 0.0) || !(comfortable_accel > 0.0) ||
      !(merge_duration > 0.0) || !(softmax_temperature > 0.0) ||
      !(yaw_rate_epsilon > 0.0) || closure_pressure < 0.0 ||
      !(closure_offset > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "predictor parameters must be positive");
  }
}

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::ConstantVelocity: return "cv";
    case PredictorKind::Ctrv: return "ctrv";
    case PredictorKind::Maneuver: return "maneuver";
  }
  return "cv";
}

PredictorKind parse_predictor_kind(std::string_view text) {
  if (text == "cv") return PredictorKind::ConstantVelocity;
  if (text == "ctrv") return PredictorKind::Ctrv;
  if (text == "maneuver") return PredictorKind::Maneuver;
  throw Error(ErrorCode::InvalidArgument,
              "unknown predictor '" + std::string(text) + "'");
}

std::string_view to_string(Maneuver maneuver) {
  switch (maneuver) {
    case Maneuver::KeepSpeed: return "keep_speed";
    case Maneuver::KeepDecelerate: return "keep_decelerate";
    case Maneuver::KeepAccelerate: return "keep_accelerate";
    case Maneuver::MergeLeft: return "merge_left";
    case Maneuver::MergeRight: return "merge_right";
    case Maneuver::Ctrv: return "ctrv";
  }
  return "keep_speed";
}

// ------------------------------------------------------------ kinematics

double estimate_yaw_rate(std::span<const TrackPoint> history, double dt) {
  if (history.size() < 2) {
    throw Error(ErrorCode::EmptyHistory,
                "yaw-rate estimation needs at least 2 history points");
  }
  std::vector<double> unwrapped;
  unwrapped.reserve(history.size());
  unwrapped.push_back(history.front().psi_rad);
  for (std::size_t i = 1; i < history.size(); ++i) {
    const double step = normalize_angle(history[i].psi_rad - history[i - 1].psi_rad);
    unwrapped.push_back(unwrapped.back() + step);
  }
  return least_squares_slope(unwrapped, dt);
}

Trajectory ctrv_rollout(Vec2 start, double speed, double heading, double omega,
                        int steps, double dt, double epsilon) {
  if (std::abs(omega) < epsilon) {
    return straight_rollout(start, speed * ahead_of(heading), steps, dt);
  }
  Trajectory out;
  out.reserve(static_cast<std::size_t>(steps));
  const double radius = speed / omega;
  for (int t = 1; t <= steps; ++t) {
    const double half = 0.5 * omega * (t * dt);
    // Chord form of the arc: avoids cancellation for small turn angles.
    const double chord = 2.0 * radius * std::sin(half);
    out.push_back(start + chord * ahead_of(heading + half));
  }
  return out;
}

// ------------------------------------------------------------ predictors

PredictionSet predict_cv(const ObservationWindow& window,
                         const PredictorConfig& config) {
  PredictionSet set = make_set(window, config);
  for (const WindowAgent& source : window.agents) {
    require_history(source, 1);
    PredictedAgent agent = make_agent(source);
    const TrackPoint& last = source.last_observed();
    fill_uniform(agent,
                 straight_rollout(last.position(), last.velocity(),
                                  config.horizon, config.dt),
                 config.modes, config.horizon);
    set.agents.push_back(std::move(agent));
  }
  return set;
}

namespace {

Trajectory ctrv_for(const WindowAgent& source, const PredictorConfig& config) {
  require_history(source, 2);
  const TrackPoint& last = source.last_observed();
  const double omega = estimate_yaw_rate(source.history, config.dt);
  if (std::abs(omega) < config.yaw_rate_epsilon) {
    return straight_rollout(last.position(), last.velocity(), config.horizon,
                            config.dt);
  }
  const double speed = norm(last.velocity());
  const double heading =
      speed > 0.1 ? std::atan2(last.vy, last.vx) : last.psi_rad;
  return ctrv_rollout(last.position(), speed, heading, omega, config.horizon,
                      config.dt, config.yaw_rate_epsilon);
}

}  // namespace

PredictionSet predict_ctrv(const ObservationWindow& window,
                           const PredictorConfig& config) {
  PredictionSet set = make_set(window, config);
  for (const WindowAgent& source : window.agents) {
    PredictedAgent agent = make_agent(source);
    fill_uniform(agent, ctrv_for(source, config), config.modes, config.horizon);
    set.agents.push_back(std::move(agent));
  }
  return set;
}

std::vector<double> softmax_probabilities(std::span<const double> costs,
                                          double temperature) {
  if (costs.empty()) return {};
  const double lowest = *std::min_element(costs.begin(), costs.end());
  std::vector<double> out(costs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    out[i] = std::exp(-(costs[i] - lowest) / temperature);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::vector<ManeuverHypothesis> maneuver_hypotheses(
    const WindowAgent& source, const LaneletMap& map,
    const PredictorConfig& config) {
  config.validate();
  require_history(source, 1);
  const TrackPoint& last = source.last_observed();
  const Vec2 pos = last.position();
  const double speed = norm(last.velocity());
  const double heading = speed > 0.5 ? std::atan2(last.vy, last.vx) : last.psi_rad;
  const LaneProjection proj = project(map, pos, heading);
  const Lanelet& lane = map.at(proj.lanelet_id);
  const double limit = lane.speed_limit;
  const Vec2 ahead = ahead_of(proj.heading_of_lane);
  const Vec2 left = left_of(proj.heading_of_lane);
  const double v_long = std::max(0.0, dot(last.velocity(), ahead));
  const double v_lat = dot(last.velocity(), left);
  const double lane_width = 2.0 * lane.half_width_at(proj.s);
  const double horizon_s = config.horizon * config.dt;

  double observed_accel = 0.0;
  if (source.history.size() >= 2) {
    std::vector<double> speeds;
    for (const TrackPoint& p : source.history) speeds.push_back(norm(p.velocity()));
    observed_accel = least_squares_slope(speeds, config.dt);
  }

  // Travelled distance after t seconds for a profile starting at v_long.
  auto travel = [&](double t, double accel, double cap) {
    if (accel == 0.0) return v_long * t;
    const double v_end = accel > 0.0 ? std::max(cap, v_long) : 0.0;
    const double t_sat = accel > 0.0 ? std::max(0.0, (v_end - v_long) / accel)
                                     : v_long / -accel;
    const double tt = std::min(t, t_sat);
    double d = v_long * tt + 0.5 * accel * tt * tt;
    if (t > tt) d += (v_long + accel * tt) * (t - tt);
    return d;
  };

  auto along_path = [&](PathStrategy strategy, double accel, double cap) {
    const double total = travel(horizon_s, accel, cap);
    PathOptions options;
    options.initial_lateral_slope = v_long > 0.5 ? v_lat / v_long : 0.0;
    double target_offset = 0.0;
    if (strategy != PathStrategy::Keep) {
      const int target = strategy == PathStrategy::MergeLeft ? *lane.adjacent_left
                                                             : *lane.adjacent_right;
      const Vec2 c = map.chain_point(proj.lanelet_id, proj.s);
      const auto tp = map.at(target).centerline.project(c);
      target_offset = dot(left, map.chain_point(target, tp.s_extended) - c);
    }
    const double remaining = std::abs(target_offset - proj.lateral_offset);
    const double fraction =
        lane_width > 0.0 ? std::min(1.0, remaining / lane_width) : 1.0;
    options.merge_length =
        std::max(10.0, std::max(v_long, 1.0) * config.merge_duration * fraction);
    const Polyline path =
        sample_path(map, proj, strategy, std::max(total, 0.0) + 5.0, options);
    Trajectory out;
    out.reserve(static_cast<std::size_t>(config.horizon));
    const Vec2 correction = pos - path.point_at(0.0);
    for (int t = 1; t <= config.horizon; ++t) {
      out.push_back(path.point_at(travel(t * config.dt, accel, cap)) + correction);
    }
    return out;
  };

  std::vector<ManeuverHypothesis> out;
  auto add = [&](Maneuver m, Trajectory traj, double initial_accel,
                 double end_speed) {
    ManeuverHypothesis h;
    h.maneuver = m;
    const Vec2 end = traj.back();
    const double lateral_change = dot(end - pos, left);
    const double trend = std::clamp(v_lat * horizon_s, -lane_width, lane_width);
    const double effort =
        lane_width > 0.0 ? std::abs(lateral_change - trend) / lane_width : 0.0;
    const double speed_dev = std::abs(end_speed - limit) / limit;
    const double consistency =
        std::abs(initial_accel - observed_accel) / config.comfortable_decel;
    double closure = 0.0;
    const bool stays_in_lane =
        std::abs(proj.lateral_offset + lateral_change) < 0.5 * lane_width;
    if ((lane.feeds_closure() || lane.closed) && stays_in_lane) {
      const double to_taper =
          lane.feeds_closure() ? std::max(0.0, *lane.taper_start_s - proj.s) : 0.0;
      closure = config.closure_pressure / (to_taper + config.closure_offset);
    }
    h.cost = effort + speed_dev + consistency + closure;
    h.positions = std::move(traj);
    out.push_back(std::move(h));
  };

  const double decel = -config.comfortable_decel;
  const double accel = v_long < limit ? config.comfortable_accel : 0.0;
  add(Maneuver::KeepSpeed, along_path(PathStrategy::Keep, 0.0, v_long), 0.0, v_long);
  add(Maneuver::KeepDecelerate, along_path(PathStrategy::Keep, decel, 0.0), decel,
      std::max(0.0, v_long + decel * horizon_s));
  add(Maneuver::KeepAccelerate, along_path(PathStrategy::Keep, accel, limit), accel,
      accel > 0.0 ? std::min(limit, v_long + accel * horizon_s) : v_long);
  if (strategy_feasible(map, lane.id, PathStrategy::MergeLeft)) {
    add(Maneuver::MergeLeft, along_path(PathStrategy::MergeLeft, 0.0, v_long), 0.0,
        v_long);
  }
  if (strategy_feasible(map, lane.id, PathStrategy::MergeRight)) {
    add(Maneuver::MergeRight, along_path(PathStrategy::MergeRight, 0.0, v_long),
        0.0, v_long);
  }
  if (source.history.size() >= 2) {
    add(Maneuver::Ctrv, ctrv_for(source, config), 0.0, speed);
  }

  std::vector<double> costs;
  for (const auto& h : out) costs.push_back(h.cost);
  const auto probs = softmax_probabilities(costs, config.softmax_temperature);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].probability = probs[i];
  return out;
}

PredictionSet predict_maneuver(const ObservationWindow& window,
                               const LaneletMap& map,
                               const PredictorConfig& config) {
  PredictionSet set = make_set(window, config);
  const auto k = static_cast<std::size_t>(config.modes);
  for (const WindowAgent& source : window.agents) {
    auto hyps = maneuver_hypotheses(source, map, config);
    std::stable_sort(hyps.begin(), hyps.end(),
                     [](const ManeuverHypothesis& a, const ManeuverHypothesis& b) {
                       return a.probability > b.probability;
                     });
    if (hyps.size() > k) hyps.resize(k);
    double kept = 0.0;
    for (const auto& h : hyps) kept += h.probability;

    PredictedAgent agent = make_agent(source);
    for (const auto& h : hyps) {
      agent.modes.push_back(h.positions);
      agent.mode_probs.push_back(h.probability / kept);
    }
    // Keep the [N, K, F, 2] shape when fewer hypotheses are feasible.
    while (agent.modes.size() < k) {
      agent.modes.push_back(agent.modes.front());
      agent.mode_probs.push_back(0.0);
    }
    const double sum =
        std::accumulate(agent.mode_probs.begin(), agent.mode_probs.end(), 0.0);
    for (double& p : agent.mode_probs) p /= sum;
    agent.anchor = agent_anchor(agent, config.horizon);
    set.agents.push_back(std::move(agent));
  }
  return set;
}

PredictionSet predict(PredictorKind kind, const ObservationWindow& window,
                      const LaneletMap* map, const PredictorConfig& config) {
  switch (kind) {
    case PredictorKind::ConstantVelocity: return predict_cv(window, config);
    case PredictorKind::Ctrv: return predict_ctrv(window, config);
    case PredictorKind::Maneuver:
      if (!map) {
        throw Error(ErrorCode::InvalidArgument,
                    "the maneuver predictor needs a map");
      }
      return predict_maneuver(window, *map, config);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown predictor");
}

// ------------------------------------------------------------ CSV dump

void write_prediction_csv(const PredictionSet& set, std::ostream& out) {
  out << "track_id,mode,step,x,y,prob\n";
  for (const PredictedAgent& a : set.agents) {
    for (std::size_t m = 0; m < a.modes.size(); ++m) {
      const std::string prob = format_fixed(a.mode_probs[m], 6);
      for (std::size_t t = 0; t < a.modes[m].size(); ++t) {
        out << a.track_id << ',' << m << ',' << (t + 1) << ','
            << format_fixed(a.modes[m][t].x, 4) << ','
            << format_fixed(a.modes[m][t].y, 4) << ',' << prob << '\n';
      }
    }
  }
}

PredictionSet read_prediction_csv(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](ErrorCode code, const std::string& what) {
    throw Error(code, std::string(source) + " row " + std::to_string(line_no) +
                          ": " + what);
  };
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyFile, std::string(source) + " is empty");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "track_id,mode,step,x,y,prob") {
    fail(ErrorCode::MissingColumn, "header must be track_id,mode,step,x,y,prob");
  }
  struct Row {
    int mode, step;
    Vec2 p;
    double prob;
  };
  std::map<int, std::vector<Row>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (f.size() != 6) fail(ErrorCode::MissingColumn, "expected 6 fields");
    auto num = [&](std::string_view s, auto& v) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        fail(ErrorCode::NonNumericField, "'" + std::string(s) + "' is not numeric");
      }
    };
    int track = 0;
    Row r{};
    num(f[0], track);
    num(f[1], r.mode);
    num(f[2], r.step);
    num(f[3], r.p.x);
    num(f[4], r.p.y);
    num(f[5], r.prob);
    if (track < 1 || r.mode < 0 || r.step < 1) {
      fail(ErrorCode::InvalidField, "track_id/mode/step out of range");
    }
    rows[track].push_back(r);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyFile, std::string(source) + " has no data rows");
  }
  PredictionSet set;
  for (const auto& [track, list] : rows) {
    int k = 0;
    int f = 0;
    for (const Row& r : list) {
      k = std::max(k, r.mode + 1);
      f = std::max(f, r.step);
    }
    if (set.agents.empty()) {
      set.num_modes = k;
      set.horizon = f;
    } else if (k != set.num_modes || f != set.horizon) {
      throw Error(ErrorCode::ModeCountMismatch,
                  std::string(source) + ": track " + std::to_string(track) +
                      " has a different K or F");
    }
    PredictedAgent agent;
    agent.track_id = track;
    agent.modes.assign(static_cast<std::size_t>(k),
                       Trajectory(static_cast<std::size_t>(f)));
    agent.mode_probs.assign(static_cast<std::size_t>(k), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(k * f), 0);
    for (const Row& r : list) {
      const auto idx = static_cast<std::size_t>(r.mode * f + r.step - 1);
      if (seen[idx]) {
        throw Error(ErrorCode::DuplicateFrame,
                    std::string(source) + ": track " + std::to_string(track) +
                        " repeats mode " + std::to_string(r.mode) + " step " +
                        std::to_string(r.step));
      }
      seen[idx] = 1;
      agent.modes[static_cast<std::size_t>(r.mode)][static_cast<std::size_t>(r.step - 1)] = r.p;
      agent.mode_probs[static_cast<std::size_t>(r.mode)] = r.prob;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error(ErrorCode::InvalidShape,
                  std::string(source) + ": track " + std::to_string(track) +
                      " is missing mode/step rows");
    }
    // Probabilities are printed at fixed precision; restore the unit sum.
    const double sum =
        std::accumulate(agent.mode_probs.begin(), agent.mode_probs.end(), 0.0);
    if (!(sum > 0.0)) {
      throw Error(ErrorCode::InvalidField,
                  std::string(source) + ": track " + std::to_string(track) +
                      " has zero total probability");
    }
    for (double& p : agent.mode_probs) p /= sum;
    set.agents.push_back(std::move(agent));
  }
  set.refresh_anchors();
  return set;
}

}  // namespace wz
