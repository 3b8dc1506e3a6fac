#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "wzsentinel/geometry.hpp"

namespace wz {

/// Arc-length parameterized polyline.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::size_t size() const { return points_.size(); }

  /// Point at arc length s; linear extrapolation past either end.
  Vec2 point_at(double s) const;
  /// Direction of travel at arc length s (segment heading, clamped at ends).
  double heading_at(double s) const;

  struct Projection {
    double s = 0.0;          // clamped to [0, length]
    double s_extended = 0.0; // unclamped; negative before the start
    double lateral = 0.0;    // signed, left of travel direction positive
    double distance = 0.0;   // Euclidean distance to the closest point
    double overshoot = 0.0;  // longitudinal distance beyond either end
  };
  Projection project(Vec2 p) const;

  /// `segments` equal arc-length pieces (segments + 1 points).
  Polyline resampled(std::size_t segments) const;

 private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

struct Lanelet {
  int id = 0;
  std::vector<Vec2> left_boundary;
  std::vector<Vec2> right_boundary;
  std::vector<int> successors;
  std::optional<int> adjacent_left;
  std::optional<int> adjacent_right;
  double speed_limit = 0.0;
  bool closed = false;
  std::optional<double> taper_start_s;
  std::optional<double> taper_end_s;

  // Derived on load.
  Polyline centerline;
  std::vector<double> half_widths;  // per centerline vertex

  double half_width_at(double s) const;
  bool feeds_closure() const { return taper_start_s && taper_end_s; }
};

struct LaneProjection {
  int lanelet_id = 0;
  double s = 0.0;
  double lateral_offset = 0.0;
  double heading_of_lane = 0.0;
};

enum class PathStrategy { Keep, MergeLeft, MergeRight };

std::string_view to_string(PathStrategy strategy);

class LaneletMap {
 public:
  /// Validates, derives centerlines (0.5 m resampling) and indexes lanelets.
  explicit LaneletMap(std::vector<Lanelet> lanelets);

  const std::vector<Lanelet>& lanelets() const { return lanelets_; }
  /// Throws SchemaError for unknown ids.
  const Lanelet& at(int id) const;
  const Lanelet* find(int id) const;
  std::vector<int> predecessors(int id) const;

  /// Centerline point and heading at arc length s along `id`, following the
  /// first successor when s runs past the end of a lanelet.
  Vec2 chain_point(int id, double s) const;
  double chain_heading(int id, double s) const;

 private:
  std::vector<Lanelet> lanelets_;  // sorted by id
};

inline constexpr double kCenterlineSpacing = 0.5;
inline constexpr double kProjectionRadius = 10.0;
inline constexpr double kHeadingWeight = 5.0;  // meters per radian
inline constexpr double kDefaultMergeLength = 40.0;

LaneletMap load_map(const std::filesystem::path& path);
LaneletMap parse_map_json(std::string_view json_text);

/// Best lanelet among those whose centerline lies within 10 m, scored by
/// |lateral| + 5 * heading mismatch (+ overshoot past the lanelet ends).
LaneProjection project(const LaneletMap& map, Vec2 point, double heading);

struct PathOptions {
  double merge_length = kDefaultMergeLength;
  /// d(lateral)/d(arc) at the start; 0 gives a pure smoothstep blend.
  double initial_lateral_slope = 0.0;
  double spacing = kCenterlineSpacing;
};

Polyline sample_path(const LaneletMap& map, const LaneProjection& start,
                     PathStrategy strategy, double distance,
                     const PathOptions& options = {});

/// Whether `strategy` is feasible from `lanelet_id`.
bool strategy_feasible(const LaneletMap& map, int lanelet_id,
                       PathStrategy strategy);

}  // namespace wz
