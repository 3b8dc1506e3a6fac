#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

#include "wzsentinel/error.hpp"
#include "wzsentinel/sim.hpp"

namespace wz {
namespace {

constexpr double kCorridorMargin = 0.3;
constexpr double kSnapTolerance = 0.01;
constexpr double kMinGap = 0.01;
constexpr int kMaxWindowAttempts = 50;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

bool overlaps(Interval a, Interval b, double margin) {
  return a.lo < b.hi + margin && b.lo < a.hi + margin;
}

Interval lane_interval(const SimLane& lane) {
  return {lane.center_offset - lane.half_width,
          lane.center_offset + lane.half_width};
}

}  // namespace

double idm_desired_gap(const IdmParams& p, double v, double dv) {
  return p.s0 + std::max(0.0, v * p.T + v * dv / (2.0 * std::sqrt(p.a * p.b)));
}

double idm_acceleration(const IdmParams& p, double v, double gap, double dv) {
  const double free = 1.0 - std::pow(v / p.v0, p.delta);
  if (std::isinf(gap)) return p.a * free;
  const double ratio = idm_desired_gap(p, v, dv) / std::max(gap, kMinGap);
  return p.a * (free - ratio * ratio);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t case_id,
                           std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(case_id & 0xffffffffu),
                    static_cast<std::uint32_t>(case_id >> 32),
                    static_cast<std::uint32_t>(stream)};
  engine_.seed(seq);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

double RandomStream::normal(double mean, double stddev) {
  // Box-Muller, one value per call.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return mean + stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// ---------------------------------------------------------------- road

SimRoad SimRoad::from_map(const LaneletMap& map) {
  std::vector<std::vector<int>> chains;
  for (const Lanelet& ll : map.lanelets()) {
    if (!map.predecessors(ll.id).empty()) continue;
    std::vector<int> chain{ll.id};
    std::set<int> seen{ll.id};
    const Lanelet* cur = &ll;
    while (!cur->successors.empty() && seen.insert(cur->successors.front()).second) {
      cur = &map.at(cur->successors.front());
      chain.push_back(cur->id);
    }
    chains.push_back(std::move(chain));
  }
  if (chains.empty()) {
    throw Error(ErrorCode::InvalidArgument, "map has no entry lanelets");
  }

  // Order left to right via adjacency of the entry lanelets.
  auto chain_of = [&](int id) -> int {
    for (std::size_t c = 0; c < chains.size(); ++c) {
      if (chains[c].front() == id) return static_cast<int>(c);
    }
    return -1;
  };
  int leftmost = -1;
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& left = map.at(chains[c].front()).adjacent_left;
    if (!left || chain_of(*left) < 0) {
      if (leftmost >= 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "entry lanelets do not form a single adjacent group");
      }
      leftmost = static_cast<int>(c);
    }
  }
  std::vector<int> order;
  for (int c = leftmost; c >= 0;) {
    order.push_back(c);
    const auto& right = map.at(chains[c].front()).adjacent_right;
    c = right ? chain_of(*right) : -1;
    if (order.size() > chains.size()) break;
  }
  if (order.size() != chains.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "entry lanelets do not form a single adjacent group");
  }

  SimRoad road;
  std::vector<Vec2> ref_points;
  for (int id : chains[order.front()]) {
    const auto& pts = map.at(id).centerline.points();
    for (const Vec2& p : pts) {
      if (ref_points.empty() || !(distance(ref_points.back(), p) < 1e-9)) {
        ref_points.push_back(p);
      }
    }
  }
  road.reference = Polyline(ref_points);
  road.length = road.reference.length();

  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& chain = chains[order[k]];
    SimLane lane;
    lane.index = static_cast<int>(k);
    lane.lanelet_ids = chain;
    const Lanelet& first = map.at(chain.front());
    lane.center_offset = road.reference.project(first.centerline.points().front()).lateral;
    lane.half_width = first.half_width_at(0.0);
    double offset = 0.0;
    for (int id : chain) {
      const Lanelet& ll = map.at(id);
      if (ll.feeds_closure()) {
        lane.taper_start_s = offset + *ll.taper_start_s;
        lane.taper_end_s = offset + *ll.taper_end_s;
      }
      if (ll.closed && std::isinf(lane.closed_from_s)) lane.closed_from_s = offset;
      offset += ll.centerline.length();
    }
    lane.length = offset;
    if (lane.has_closure() && std::isinf(lane.closed_from_s)) {
      lane.closed_from_s = *lane.taper_end_s;
    }
    road.lanes.push_back(std::move(lane));
  }

  for (const SimLane& lane : road.lanes) {
    if (!lane.has_closure()) continue;
    if (road.closed_lane >= 0) {
      throw Error(ErrorCode::InvalidArgument, "map has more than one closed lane");
    }
    road.closed_lane = lane.index;
  }
  if (road.closed_lane < 0) {
    throw Error(ErrorCode::InvalidArgument, "map has no closed lane with taper");
  }
  const int left = road.closed_lane - 1;
  const int right = road.closed_lane + 1;
  if (left >= 0 && !road.lanes[left].has_closure()) {
    road.merge_target_lane = left;
  } else if (right < static_cast<int>(road.lanes.size())) {
    road.merge_target_lane = right;
  } else {
    throw Error(ErrorCode::InvalidArgument, "closed lane has no open neighbor");
  }
  return road;
}

int SimRoad::nearest_lane(double lateral) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const SimLane& lane : lanes) {
    const double d = std::abs(lateral - lane.center_offset);
    if (d < best_d) {
      best_d = d;
      best = lane.index;
    }
  }
  return best;
}

Vec2 SimRoad::to_global(double s, double lateral) const {
  const Vec2 c = reference.point_at(s);
  const double h = reference.heading_at(s);
  return {c.x - lateral * std::sin(h), c.y + lateral * std::cos(h)};
}

// ---------------------------------------------------------------- model

TrafficModel::TrafficModel(SimConfig config, SimRoad road)
    : config_(std::move(config)), road_(std::move(road)) {
  config_.validate();
}

double TrafficModel::desired_speed(const SimVehicle& v) const {
  const SimLane& closure = road_.lanes[road_.closed_lane];
  const double limit = v.s >= *closure.taper_start_s ? config_.work_zone_speed_limit
                                                     : config_.speed_limit;
  return std::min(config_.idm_v0, limit) * v.speed_factor;
}

IdmParams TrafficModel::idm_for(const SimVehicle& v) const {
  IdmParams p;
  p.v0 = desired_speed(v);
  p.T = config_.idm_T;
  p.a = config_.idm_a;
  p.b = config_.idm_b;
  p.s0 = config_.idm_s0;
  p.delta = config_.idm_delta;
  return p;
}

double TrafficModel::relative_yaw(const SimVehicle& v) const {
  return std::atan2(v.lateral_v, std::max(v.v, config_.heading_speed_floor));
}

double TrafficModel::half_extent_long(const SimVehicle& v) const {
  const double a = relative_yaw(v);
  return 0.5 * (v.length * std::abs(std::cos(a)) + v.width * std::abs(std::sin(a)));
}

double TrafficModel::half_extent_lat(const SimVehicle& v) const {
  const double a = relative_yaw(v);
  return 0.5 * (v.length * std::abs(std::sin(a)) + v.width * std::abs(std::cos(a)));
}

namespace {

Interval footprint(const TrafficModel& m, const SimVehicle& v) {
  const double h = m.half_extent_lat(v);
  return {v.lateral - h, v.lateral + h};
}

// Own footprint plus the claimed target lane while changing lanes.
Interval corridor(const TrafficModel& m, const SimVehicle& v) {
  Interval out = footprint(m, v);
  if (v.target_lane) {
    const Interval t = lane_interval(m.road().lanes[*v.target_lane]);
    out.lo = std::min(out.lo, t.lo);
    out.hi = std::max(out.hi, t.hi);
  }
  return out;
}

bool in_closed_lane(const TrafficModel& m, const SimVehicle& v) {
  const SimLane& closed = m.road().lanes[m.road().closed_lane];
  return overlaps(footprint(m, v), lane_interval(closed), 0.0);
}

bool seeking_merge(const TrafficModel& m, const SimVehicle& v) {
  const SimLane& closed = m.road().lanes[m.road().closed_lane];
  return v.lane == closed.index && !v.target_lane &&
         v.s >= *closed.taper_start_s - m.config().merge_advance_m;
}

}  // namespace

double TrafficModel::longitudinal_accel(const World& world, std::size_t index) const {
  const SimVehicle& me = world.vehicles[index];
  const IdmParams p = idm_for(me);
  const Interval mine = corridor(*this, me);
  const double my_half = half_extent_long(me);

  double accel = idm_acceleration(p, me.v, std::numeric_limits<double>::infinity(), 0.0);
  auto consider = [&](double gap, double leader_v) {
    accel = std::min(accel, idm_acceleration(p, me.v, gap, me.v - leader_v));
  };

  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == index) continue;
    const SimVehicle& other = world.vehicles[j];
    if (other.s < me.s || (other.s == me.s && other.id < me.id)) continue;
    const double gap = other.s - me.s - my_half - half_extent_long(other);
    if (overlaps(mine, corridor(*this, other), kCorridorMargin)) {
      consider(gap, other.v);
    } else if (me.cooperative && seeking_merge(*this, other) &&
               me.lane == road_.merge_target_lane && gap > 0.0 &&
               gap < config_.yield_distance_m) {
      consider(gap, other.v);
    }
  }

  const SimLane& closed = road_.lanes[road_.closed_lane];
  if (in_closed_lane(*this, me) &&
      me.s >= *closed.taper_start_s - config_.merge_advance_m) {
    consider(*closed.taper_end_s - me.s - my_half, 0.0);
  }
  return std::max(accel, -config_.max_decel);
}

bool TrafficModel::accepts_merge_gap(const World& world, std::size_t index) const {
  const SimVehicle& me = world.vehicles[index];
  const Interval target = lane_interval(road_.lanes[road_.merge_target_lane]);
  const double f =
      1.0 - 0.5 * std::min(1.0, me.merge_wait_s / config_.impatience_time_s);
  const double my_half = half_extent_long(me);
  for (std::size_t j = 0; j < world.vehicles.size(); ++j) {
    if (j == index) continue;
    const SimVehicle& other = world.vehicles[j];
    if (!overlaps(target, corridor(*this, other), kCorridorMargin)) continue;
    const double span = my_half + half_extent_long(other);
    if (other.s >= me.s) {
      const double gap = other.s - me.s - span;
      if (gap < f * (config_.idm_s0 + config_.gap_lead_s * me.v)) return false;
    } else {
      const double gap = me.s - other.s - span;
      if (gap < f * (config_.idm_s0 + config_.gap_lag_s * other.v)) return false;
      const double response =
          idm_acceleration(idm_for(other), other.v, gap, other.v - me.v);
      if (response < -2.0 * config_.idm_b) return false;
    }
  }
  return true;
}

World TrafficModel::step(const World& world, double dt) const {
  const std::size_t n = world.vehicles.size();
  std::vector<double> accel(n);
  for (std::size_t i = 0; i < n; ++i) accel[i] = longitudinal_accel(world, i);

  World next;
  next.time = world.time + dt;
  next.vehicles = world.vehicles;

  const SimLane& closed = road_.lanes[road_.closed_lane];
  for (std::size_t i = 0; i < n; ++i) {
    SimVehicle& v = next.vehicles[i];
    if (seeking_merge(*this, world.vehicles[i])) {
      if (accepts_merge_gap(world, i)) {
        v.target_lane = road_.merge_target_lane;
      } else {
        v.merge_wait_s += dt;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    SimVehicle& v = next.vehicles[i];
    const double a = accel[i];

    // Longitudinal, ballistic with v >= 0.
    double v_new = v.v + a * dt;
    double ds;
    if (v_new < 0.0) {
      ds = a < 0.0 ? -v.v * v.v / (2.0 * a) : 0.0;
      v_new = 0.0;
    } else {
      ds = v.v * dt + 0.5 * a * dt * dt;
    }
    const double s_old = v.s;
    v.accel = (v_new - v.v) / dt;
    v.s += std::max(0.0, ds);
    v.v = v_new;

    // Lateral controller toward the target lane center.
    const double a_lat = config_.a_lat_max;
    double lat_v_new = v.lateral_v;
    if (v.target_lane) {
      const double e = road_.lanes[*v.target_lane].center_offset - v.lateral;
      const double vmax = config_.lateral_speed_limit(v.v);
      // Largest speed toward the target that can still stop on it: the
      // trapezoid step (v + v') dt / 2 plus the braking distance v'^2 / 2a.
      const double dir = e < 0.0 ? -1.0 : 1.0;
      const double v0 = dir * v.lateral_v;
      const double c = v0 * dt / 2.0 - std::abs(e);
      const double disc = dt * dt / 4.0 - 2.0 * c / a_lat;
      const double brake = disc > 0.0 ? a_lat * (std::sqrt(disc) - dt / 2.0) : 0.0;
      const double want = dir * std::min(vmax, std::max(0.0, brake));
      lat_v_new = v.lateral_v + std::clamp(want - v.lateral_v, -a_lat * dt, a_lat * dt);
      lat_v_new = std::clamp(lat_v_new, -vmax, vmax);
    } else {
      lat_v_new = v.lateral_v - std::clamp(v.lateral_v, -a_lat * dt, a_lat * dt);
    }
    const double lat_v_old = v.lateral_v;
    v.lateral += 0.5 * (lat_v_old + lat_v_new) * dt;
    v.lateral_a = (lat_v_new - lat_v_old) / dt;
    v.lateral_v = lat_v_new;

    if (v.target_lane) {
      const double e = road_.lanes[*v.target_lane].center_offset - v.lateral;
      // Snapping must not exceed the lateral acceleration bound either.
      if (std::abs(e) < kSnapTolerance && std::abs(lat_v_old) <= a_lat * dt) {
        v.lateral_a = -lat_v_old / dt;
        v.lateral += e;
        v.lateral_v = 0.0;
        v.lane = *v.target_lane;
        v.target_lane.reset();
        v.merge_wait_s = 0.0;
      }
    }
    if (!v.target_lane) v.lane = road_.nearest_lane(v.lateral);

    // Vehicles still touching the closed lane never pass the taper end.
    if (in_closed_lane(*this, v)) {
      const double limit = *closed.taper_end_s - half_extent_long(v) - 1e-3;
      if (v.s > limit) {
        v.s = std::max(s_old, limit);
        v.accel = -v.v / dt;
        v.v = 0.0;
      }
    }
  }

  std::erase_if(next.vehicles, [&](const SimVehicle& v) {
    return v.s - half_extent_long(v) > road_.length;
  });
  return next;
}

TrackPoint TrafficModel::record(const SimVehicle& v, int track_id, int frame_id) const {
  TrackPoint p;
  p.track_id = track_id;
  p.frame_id = frame_id;
  p.timestamp_ms = kFramePeriodMs * frame_id;
  p.agent_type = v.agent_type;
  const Vec2 pos = road_.to_global(v.s, v.lateral);
  const double h = road_.heading_at(v.s);
  p.x = pos.x;
  p.y = pos.y;
  p.vx = v.v * std::cos(h) - v.lateral_v * std::sin(h);
  p.vy = v.v * std::sin(h) + v.lateral_v * std::cos(h);
  p.psi_rad = normalize_angle(h + relative_yaw(v));
  p.length = v.length;
  p.width = v.width;
  return p;
}

SimVehicle TrafficModel::make_vehicle(int id, AgentType type, int lane, double s,
                                      double v, double speed_factor,
                                      bool cooperative) const {
  SimVehicle out;
  out.id = id;
  out.agent_type = type;
  out.length = type == AgentType::Truck ? kTruckLength : kCarLength;
  out.width = type == AgentType::Truck ? kTruckWidth : kCarWidth;
  out.speed_factor = speed_factor;
  out.cooperative = cooperative;
  out.s = s;
  out.v = v;
  out.lane = lane;
  out.lateral = road_.lanes[lane].center_offset;
  return out;
}

// ---------------------------------------------------------------- cases

namespace {

struct Spawner {
  const TrafficModel& model;
  RandomStream arrivals;
  RandomStream types;
  RandomStream jitter;
  std::vector<double> next_arrival;
  int next_id = 1;

  Spawner(const TrafficModel& m, const SimConfig& c, int case_id)
      : model(m),
        arrivals(c.seed, static_cast<std::uint64_t>(case_id), 0),
        types(c.seed, static_cast<std::uint64_t>(case_id), 1),
        jitter(c.seed, static_cast<std::uint64_t>(case_id), 2) {
    for (std::size_t k = 0; k < m.road().lanes.size(); ++k) {
      next_arrival.push_back(arrivals.exponential(c.inflow_per_lane));
    }
  }

  // Spawns due arrivals while `allow()` holds; returns the number added.
  template <typename Allow>
  int spawn(World& world, Allow allow) {
    const SimConfig& c = model.config();
    int added = 0;
    for (std::size_t k = 0; k < next_arrival.size(); ++k) {
      while (next_arrival[k] <= world.time + 1e-9) {
        next_arrival[k] += arrivals.exponential(c.inflow_per_lane);
        const AgentType type =
            types.uniform() < c.truck_fraction ? AgentType::Truck : AgentType::Car;
        const double factor =
            std::clamp(jitter.normal(1.0, c.speed_jitter), 0.8, 1.2);
        const bool cooperative = jitter.uniform() < c.cooperation_fraction;
        if (!allow()) continue;

        SimVehicle cand = model.make_vehicle(0, type, static_cast<int>(k), 0.0, 0.0,
                                             factor, cooperative);
        cand.s = 0.5 * cand.length;
        const Interval lane = lane_interval(model.road().lanes[k]);
        double gap = std::numeric_limits<double>::infinity();
        bool blocked = false;
        double leader_v = 0.0;
        for (const SimVehicle& o : world.vehicles) {
          if (!overlaps(lane, corridor(model, o), kCorridorMargin)) continue;
          const double g = o.s - cand.s - model.half_extent_long(cand) -
                           model.half_extent_long(o);
          if (o.s < cand.s || g < c.idm_s0) {
            blocked = true;
            break;
          }
          if (g < gap) {
            gap = g;
            leader_v = o.v;
          }
        }
        if (blocked) continue;
        const double v_des = model.desired_speed(cand);
        double v_in = v_des;
        if (std::isfinite(gap)) {
          v_in = std::clamp(leader_v + (gap - c.idm_s0) / c.idm_T, 0.0, v_des);
        }
        cand.v = v_in;
        cand.id = next_id++;
        world.vehicles.push_back(cand);
        ++added;
      }
    }
    return added;
  }
};

}  // namespace

ScenarioCase run_case(const SimConfig& config, const LaneletMap& map, int case_id) {
  config.validate();
  TrafficModel model(config, SimRoad::from_map(map));
  const SimRoad& road = model.road();

  const double reachable = config.inflow_per_lane * static_cast<double>(road.lanes.size()) *
                           road.length / config.speed_limit;
  if (reachable < config.density_min) {
    throw Error(ErrorCode::DensityUnreachable,
                "inflow sustains about " + std::to_string(reachable) +
                    " vehicles, below density_min " + std::to_string(config.density_min));
  }

  const int present_cap = (config.density_min + config.density_max) / 2;
  const int frames = config.frames();
  Spawner spawner(model, config, case_id);
  World world;

  const auto warmup_steps = static_cast<long>(std::lround(config.warmup_s / config.dt));
  for (long k = 0; k < warmup_steps; ++k) {
    spawner.spawn(world, [&] {
      return static_cast<int>(world.vehicles.size()) < present_cap;
    });
    world = model.step(world, config.dt);
  }

  for (int attempt = 0; attempt < kMaxWindowAttempts; ++attempt) {
    std::map<int, std::vector<TrackPoint>> recorded;  // internal id -> points
    auto record_frame = [&](int frame) {
      for (const SimVehicle& v : world.vehicles) {
        recorded[v.id].push_back(model.record(v, 0, frame));
      }
    };
    record_frame(1);
    for (int frame = 2; frame <= frames; ++frame) {
      spawner.spawn(world, [&] {
        return static_cast<int>(world.vehicles.size()) < present_cap + 2 &&
               static_cast<int>(recorded.size()) < config.density_max;
      });
      world = model.step(world, config.dt);
      record_frame(frame);
    }

    const int distinct = static_cast<int>(recorded.size());
    if (distinct >= config.density_min && distinct <= config.density_max) {
      std::vector<std::pair<int, int>> order;  // (first frame, internal id)
      for (const auto& [id, pts] : recorded) order.emplace_back(pts.front().frame_id, id);
      std::sort(order.begin(), order.end());
      ScenarioCase out;
      out.case_id = case_id;
      int track_id = 1;
      for (const auto& [first, id] : order) {
        VehicleTrack track;
        track.track_id = track_id;
        track.agent_type = recorded[id].front().agent_type;
        track.points = recorded[id];
        for (TrackPoint& p : track.points) p.track_id = track_id;
        out.tracks.emplace(track_id, std::move(track));
        ++track_id;
      }
      validate_case(out);
      return out;
    }
    // Keep the traffic running and try the next window.
    spawner.spawn(world, [&] {
      return static_cast<int>(world.vehicles.size()) < present_cap;
    });
    world = model.step(world, config.dt);
  }
  throw Error(ErrorCode::DensityUnreachable,
              "case " + std::to_string(case_id) + ": no window with " +
                  std::to_string(config.density_min) + "-" +
                  std::to_string(config.density_max) + " vehicles after " +
                  std::to_string(kMaxWindowAttempts) + " attempts");
}

unsigned worker_threads(unsigned requested) {
  unsigned n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WZ_SENTINEL_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) {
      n = std::min(n, static_cast<unsigned>(cap));
    }
  }
  return std::max(1u, n);
}

DatasetSummary run_dataset(const SimConfig& config, const LaneletMap& map,
                           const std::filesystem::path& out_dir, unsigned threads) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir.string());
  }

  const int n = config.n_cases;
  std::vector<DatasetEntry> entries(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        const int case_id = i + 1;
        const ScenarioCase scenario = run_case(config, map, case_id);
        const std::string file = case_file_name(case_id);
        write_case_csv(scenario, out_dir / file);
        entries[i] = {case_id, static_cast<int>(scenario.tracks.size()), file};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::min<unsigned>(worker_threads(threads),
                                            static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  DatasetSummary summary;
  summary.seed = config.seed;
  summary.config_digest = config.digest();
  summary.cases = entries;
  summary.manifest = out_dir / "manifest.json";

  nlohmann::ordered_json doc;
  doc["seed"] = config.seed;
  doc["config_digest"] = summary.config_digest;
  doc["n_cases"] = n;
  auto& list = doc["cases"] = nlohmann::ordered_json::array();
  for (const DatasetEntry& e : entries) {
    list.push_back({{"case_id", e.case_id}, {"n_vehicles", e.n_vehicles}, {"file", e.file}});
  }
  std::ofstream out(summary.manifest, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + summary.manifest.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + summary.manifest.string());
  return summary;
}

}  // namespace wz
