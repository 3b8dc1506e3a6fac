#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wzsentinel/lanelet_map.hpp"
#include "wzsentinel/trajdata.hpp"

namespace wz {

/// Simulator settings. Key names in the text config file match the field
/// names; the SUMO knob each lateral setting mirrors is noted alongside.
struct SimConfig {
  std::uint64_t seed = 42;
  int n_cases = 10;
  double case_duration_s = 4.0;
  double dt = 0.1;
  double warmup_s = 60.0;

  int density_min = 18;  // distinct vehicles per recorded case
  int density_max = 22;
  double inflow_per_lane = 0.6;  // veh/s offered at every entry lane
  double speed_limit = 25.0;
  double work_zone_speed_limit = 20.0;  // from the taper start on
  double truck_fraction = 0.1;
  double speed_jitter = 0.05;  // std of the desired-speed factor

  // Car following.
  double idm_v0 = 25.0;
  double idm_T = 1.5;
  double idm_a = 1.5;
  double idm_b = 2.0;
  double idm_s0 = 2.0;
  double idm_delta = 4.0;
  double max_decel = 9.0;

  // Lateral motion and merging.
  double a_lat_max = 1.0;       // lcAccelLat
  double v_lat_standing = 0.5;  // lcMaxSpeedLatStanding
  double v_lat_factor = 0.02;   // lcMaxSpeedLatFactor
  double gap_lead_s = 1.0;
  double gap_lag_s = 1.0;
  double impatience_time_s = 10.0;  // lcTimeToImpatience
  double merge_advance_m = 100.0;   // gap seeking starts this far before the taper
  double cooperation_fraction = 0.5;  // share of drivers that yield to mergers
  double yield_distance_m = 50.0;     // look-ahead for yielding to a merger
  double heading_speed_floor = 5.0;   // m/s floor in atan2(lateral v, v)

  int frames() const;
  double lateral_speed_limit(double v) const {
    return v_lat_standing + v_lat_factor * v;
  }
  /// ConfigError on the first violated constraint.
  void validate() const;
  /// Canonical `key=value` rendering, one key per line in a fixed order.
  std::string to_text() const;
  /// 16 hex digits (FNV-1a over to_text()).
  std::string digest() const;
};

SimConfig parse_sim_config(std::string_view text);
SimConfig load_sim_config(const std::filesystem::path& path);

struct IdmParams {
  double v0 = 25.0;
  double T = 1.5;
  double a = 1.5;
  double b = 2.0;
  double s0 = 2.0;
  double delta = 4.0;
};

/// Desired gap s* = s0 + max(0, v T + v dv / (2 sqrt(a b))), dv = v - v_leader.
double idm_desired_gap(const IdmParams& p, double v, double dv);
/// a [1 - (v/v0)^delta - (s*/gap)^2]; pass gap = +inf for a free road.
double idm_acceleration(const IdmParams& p, double v, double gap, double dv);

/// Deterministic generator: mt19937_64 seeded from (seed, case, stream) with
/// distribution transforms done here so results do not depend on the
/// standard library's distribution implementations.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t case_id, std::uint64_t stream);
  double uniform();  // [0, 1)
  double exponential(double rate);
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
};

struct SimLane {
  int index = 0;  // 0 = leftmost
  std::vector<int> lanelet_ids;
  double center_offset = 0.0;  // lateral offset from the reference line, left +
  double half_width = 1.75;
  double length = 0.0;
  double closed_from_s = std::numeric_limits<double>::infinity();
  std::optional<double> taper_start_s;
  std::optional<double> taper_end_s;

  bool has_closure() const { return taper_end_s.has_value(); }
};

/// Parallel lane chains derived from the map plus the reference line used
/// for the road-aligned (s, lateral) frame.
struct SimRoad {
  Polyline reference;
  std::vector<SimLane> lanes;  // left to right
  double length = 0.0;
  int closed_lane = -1;
  int merge_target_lane = -1;

  static SimRoad from_map(const LaneletMap& map);
  int nearest_lane(double lateral) const;
  Vec2 to_global(double s, double lateral) const;
  double heading_at(double s) const { return reference.heading_at(s); }
};

struct SimVehicle {
  int id = 0;
  AgentType agent_type = AgentType::Car;
  double length = 4.5;
  double width = 1.8;
  double speed_factor = 1.0;
  bool cooperative = false;

  double s = 0.0;  // front-back center along the road
  double v = 0.0;
  double accel = 0.0;
  double lateral = 0.0;  // road-frame lateral position, left +
  double lateral_v = 0.0;
  double lateral_a = 0.0;

  int lane = 0;
  std::optional<int> target_lane;
  double merge_wait_s = 0.0;
};

inline constexpr double kCarLength = 4.5;
inline constexpr double kCarWidth = 1.8;
inline constexpr double kTruckLength = 12.0;
inline constexpr double kTruckWidth = 2.5;

struct World {
  double time = 0.0;
  std::vector<SimVehicle> vehicles;  // ascending id
};

/// Car following, merging and lateral dynamics on a SimRoad. Stateless
/// apart from configuration; `step` is a pure function of the world.
class TrafficModel {
 public:
  TrafficModel(SimConfig config, SimRoad road);

  const SimConfig& config() const { return config_; }
  const SimRoad& road() const { return road_; }

  World step(const World& world, double dt) const;

  double desired_speed(const SimVehicle& v) const;
  IdmParams idm_for(const SimVehicle& v) const;
  /// IDM acceleration given the current leaders (and the closure stop line).
  double longitudinal_accel(const World& world, std::size_t index) const;
  /// Whether a closed-lane vehicle can start merging right now.
  bool accepts_merge_gap(const World& world, std::size_t index) const;

  TrackPoint record(const SimVehicle& v, int track_id, int frame_id) const;
  SimVehicle make_vehicle(int id, AgentType type, int lane, double s, double v,
                          double speed_factor, bool cooperative = false) const;

  /// Yaw relative to the road: atan2(lateral v, max(v, heading floor)).
  double relative_yaw(const SimVehicle& v) const;
  /// Half extents of the rotated footprint along and across the road.
  double half_extent_long(const SimVehicle& v) const;
  double half_extent_lat(const SimVehicle& v) const;

 private:
  SimConfig config_;
  SimRoad road_;
};

/// ScenarioCase generated for `case_id`. Deterministic in (config, map,
/// case_id). DensityUnreachable when the distinct-vehicle band cannot be met.
ScenarioCase run_case(const SimConfig& config, const LaneletMap& map,
                      int case_id);

struct DatasetEntry {
  int case_id = 0;
  int n_vehicles = 0;
  std::string file;
};

struct DatasetSummary {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<DatasetEntry> cases;
  std::filesystem::path manifest;
};

/// Writes n_cases case CSVs plus manifest.json into `out_dir`. Cases are
/// generated on up to `threads` workers (0 = WZ_SENTINEL_THREADS or the
/// hardware concurrency).
DatasetSummary run_dataset(const SimConfig& config, const LaneletMap& map,
                           const std::filesystem::path& out_dir,
                           unsigned threads = 0);

/// Worker count honoring WZ_SENTINEL_THREADS.
unsigned worker_threads(unsigned requested = 0);

}  // namespace wz
