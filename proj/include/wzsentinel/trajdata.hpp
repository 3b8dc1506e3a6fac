#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wzsentinel/geometry.hpp"

namespace wz {

inline constexpr int kMaxFrames = 40;
inline constexpr int kFramePeriodMs = 100;
inline constexpr double kFrameDt = 0.1;

inline constexpr std::string_view kCaseCsvHeader =
    "track_id,timestamp_ms,frame_id,agent_type,x,y,vx,vy,psi_rad,length,width";

enum class AgentType { Car, Truck };

std::string_view to_string(AgentType type);
/// Accepts exactly "car" or "truck"; anything else is InvalidField.
AgentType parse_agent_type(std::string_view text);

struct TrackPoint {
  int track_id = 0;
  int timestamp_ms = 0;
  int frame_id = 0;
  AgentType agent_type = AgentType::Car;
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double psi_rad = 0.0;
  double length = 0.0;
  double width = 0.0;

  Vec2 position() const { return {x, y}; }
  Vec2 velocity() const { return {vx, vy}; }
  OrientedBox box() const { return {{x, y}, psi_rad, length, width}; }

  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

struct VehicleTrack {
  int track_id = 0;
  AgentType agent_type = AgentType::Car;
  std::vector<TrackPoint> points;  // strictly increasing frame_id

  int first_frame() const { return points.front().frame_id; }
  int last_frame() const { return points.back().frame_id; }
  bool present_over(int first, int last) const;
  /// Point at `frame_id`; the caller guarantees presence.
  const TrackPoint& at_frame(int frame_id) const;

  friend bool operator==(const VehicleTrack&, const VehicleTrack&) = default;
};

struct ScenarioCase {
  int case_id = 0;
  std::map<int, VehicleTrack> tracks;

  int max_frame() const;
  std::size_t row_count() const;

  friend bool operator==(const ScenarioCase&, const ScenarioCase&) = default;
};

/// Throws the first violated invariant: contiguous track ids 1..n, frames in
/// [1, 40], timestamps equal to 100 * frame, strictly increasing frames with
/// no gaps, positive dimensions, consistent agent type.
void validate_case(const ScenarioCase& scenario);

/// `trajectory_data_case_<id>.csv`
std::string case_file_name(int case_id);
/// Inverse of case_file_name; BadFileName when the pattern does not match.
int case_id_from_path(const std::filesystem::path& path);

ScenarioCase parse_case_csv(const std::filesystem::path& path);
/// Parses an already opened stream. `source` only labels error messages.
ScenarioCase parse_case_csv(std::istream& in, int case_id,
                            std::string_view source = "<stream>");

void write_case_csv(const ScenarioCase& scenario,
                    const std::filesystem::path& path);
void write_case_csv(const ScenarioCase& scenario, std::ostream& out);

/// Fixed-precision rendering used by every CSV this project emits.
std::string format_fixed(double value, int decimals);

struct WindowAgent {
  int track_id = 0;
  AgentType agent_type = AgentType::Car;
  double length = 0.0;
  double width = 0.0;
  std::vector<TrackPoint> history;       // H points
  std::vector<TrackPoint> future_truth;  // F points

  const TrackPoint& last_observed() const { return history.back(); }
};

struct ObservationWindow {
  int case_id = 0;
  int start_frame = 0;  // first history frame
  int history_len = 0;  // H
  int future_len = 0;   // F
  double dt = kFrameDt;
  std::vector<WindowAgent> agents;  // ascending track_id

  /// Frame of the last observed sample; predictions are issued here.
  int issue_frame() const { return start_frame + history_len - 1; }
};

/// Sliding windows at every start frame 1..max_frame-(H+F)+1. Only vehicles
/// present over the whole H+F span are included.
std::vector<ObservationWindow> extract_windows(const ScenarioCase& scenario,
                                               int history_len, int future_len);

}  // namespace wz
