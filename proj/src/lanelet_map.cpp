#include "wzsentinel/lanelet_map.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "wzsentinel/error.hpp"

namespace wz {
namespace {

using nlohmann::json;

Vec2 unit(Vec2 v) {
  const double n = norm(v);
  return n > 0.0 ? Vec2{v.x / n, v.y / n} : Vec2{1.0, 0.0};
}

Vec2 left_normal(double heading) {
  return {-std::sin(heading), std::cos(heading)};
}

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  if (v > 1e-12) return 1;
  if (v < -1e-12) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
         std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

bool self_intersects(const std::vector<Vec2>& pts) {
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    for (std::size_t j = i + 2; j + 1 < pts.size(); ++j) {
      if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) {
        return true;
      }
    }
  }
  return false;
}

bool polylines_intersect(const std::vector<Vec2>& a,
                         const std::vector<Vec2>& b) {
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      if (segments_intersect(a[i], a[i + 1], b[j], b[j + 1])) return true;
    }
  }
  return false;
}

[[noreturn]] void degenerate(int id, const std::string& what) {
  throw Error(ErrorCode::DegenerateBoundary,
              "lanelet " + std::to_string(id) + ": " + what);
}

void derive_geometry(Lanelet& ll) {
  for (const auto* boundary : {&ll.left_boundary, &ll.right_boundary}) {
    if (boundary->size() < 2) degenerate(ll.id, "boundary needs >= 2 points");
    for (const Vec2& p : *boundary) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        degenerate(ll.id, "non-finite boundary point");
      }
    }
    if (self_intersects(*boundary)) {
      degenerate(ll.id, "boundary intersects itself");
    }
  }
  const Polyline left(ll.left_boundary);
  const Polyline right(ll.right_boundary);
  if (left.length() <= 0.0 || right.length() <= 0.0) {
    degenerate(ll.id, "boundary has zero length");
  }
  if (polylines_intersect(ll.left_boundary, ll.right_boundary)) {
    degenerate(ll.id, "left and right boundaries cross or touch");
  }
  const double longest = std::max(left.length(), right.length());
  const auto segments = static_cast<std::size_t>(
      std::max(1.0, std::ceil(longest / kCenterlineSpacing)));
  const Polyline lr = left.resampled(segments);
  const Polyline rr = right.resampled(segments);

  std::vector<Vec2> center(segments + 1);
  ll.half_widths.assign(segments + 1, 0.0);
  for (std::size_t i = 0; i <= segments; ++i) {
    center[i] = 0.5 * (lr.points()[i] + rr.points()[i]);
    ll.half_widths[i] = 0.5 * distance(lr.points()[i], rr.points()[i]);
  }
  for (std::size_t i = 0; i <= segments; ++i) {
    const std::size_t a = i == segments ? i - 1 : i;
    const Vec2 tangent = center[a + 1] - center[a];
    if (!(cross(tangent, lr.points()[i] - rr.points()[i]) > 0.0)) {
      degenerate(ll.id, "left boundary is not left of the right boundary");
    }
  }
  ll.centerline = Polyline(std::move(center));
  if (ll.centerline.length() <= 0.0) degenerate(ll.id, "empty centerline");
}

[[noreturn]] void schema(const std::string& what) {
  throw Error(ErrorCode::SchemaError, what);
}

std::vector<Vec2> read_points(const json& j, const std::string& where) {
  if (!j.is_array()) schema(where + " must be an array of [x,y]");
  std::vector<Vec2> out;
  for (const json& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      schema(where + " entries must be [x,y] number pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

std::optional<int> read_optional_int(const json& j, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number_integer()) schema(where + " must be an integer or null");
  return j.get<int>();
}

std::optional<double> read_optional_double(const json& j,
                                           const std::string& where) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number()) schema(where + " must be a number or null");
  return j.get<double>();
}

Lanelet read_lanelet(const json& j) {
  static const std::set<std::string> kKeys = {
      "id",          "left",           "right",          "successors",
      "adjacent_left", "adjacent_right", "speed_limit",  "closed",
      "taper_start_s", "taper_end_s"};
  if (!j.is_object()) schema("lanelet entries must be objects");
  for (const auto& [key, value] : j.items()) {
    if (!kKeys.count(key)) schema("unknown lanelet key '" + key + "'");
  }
  for (const std::string& key : kKeys) {
    if (!j.contains(key)) schema("lanelet is missing key '" + key + "'");
  }
  if (!j["id"].is_number_integer()) schema("lanelet id must be an integer");
  Lanelet ll;
  ll.id = j["id"].get<int>();
  const std::string where = "lanelet " + std::to_string(ll.id);
  ll.left_boundary = read_points(j["left"], where + ".left");
  ll.right_boundary = read_points(j["right"], where + ".right");
  if (!j["successors"].is_array()) schema(where + ".successors must be an array");
  for (const json& s : j["successors"]) {
    if (!s.is_number_integer()) schema(where + ".successors must hold integers");
    ll.successors.push_back(s.get<int>());
  }
  ll.adjacent_left = read_optional_int(j["adjacent_left"], where + ".adjacent_left");
  ll.adjacent_right = read_optional_int(j["adjacent_right"], where + ".adjacent_right");
  if (!j["speed_limit"].is_number()) schema(where + ".speed_limit must be a number");
  ll.speed_limit = j["speed_limit"].get<double>();
  if (!j["closed"].is_boolean()) schema(where + ".closed must be a boolean");
  ll.closed = j["closed"].get<bool>();
  ll.taper_start_s = read_optional_double(j["taper_start_s"], where + ".taper_start_s");
  ll.taper_end_s = read_optional_double(j["taper_end_s"], where + ".taper_end_s");
  return ll;
}

double smoothstep_blend(double tau, double initial_slope) {
  tau = std::clamp(tau, 0.0, 1.0);
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  return initial_slope * (t3 - 2.0 * t2 + tau) + (3.0 * t2 - 2.0 * t3);
}

}  // namespace

// ---------------------------------------------------------------- Polyline

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  cumulative_.reserve(points_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0) acc += distance(points_[i - 1], points_[i]);
    cumulative_.push_back(acc);
  }
}

std::size_t Polyline::segment_index(double s) const {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  idx = idx == 0 ? 0 : idx - 1;
  return std::min(idx, points_.size() - 2);
}

Vec2 Polyline::point_at(double s) const {
  if (points_.size() == 1) return points_.front();
  const std::size_t i = segment_index(std::clamp(s, 0.0, length()));
  const Vec2 a = points_[i];
  const Vec2 b = points_[i + 1];
  const double seg = cumulative_[i + 1] - cumulative_[i];
  if (seg <= 0.0) return a;
  const double t = (s - cumulative_[i]) / seg;  // may leave [0,1] at the ends
  return a + t * (b - a);
}

double Polyline::heading_at(double s) const {
  if (points_.size() < 2) return 0.0;
  std::size_t i = segment_index(std::clamp(s, 0.0, length()));
  // Skip zero-length segments.
  while (i + 2 < points_.size() && distance(points_[i], points_[i + 1]) == 0.0) ++i;
  const Vec2 d = points_[i + 1] - points_[i];
  return std::atan2(d.y, d.x);
}

Polyline::Projection Polyline::project(Vec2 p) const {
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  if (points_.size() < 2) {
    best.distance = points_.empty() ? best.distance : distance(p, points_[0]);
    return best;
  }
  const std::size_t last_seg = points_.size() - 2;
  for (std::size_t i = 0; i <= last_seg; ++i) {
    const Vec2 a = points_[i];
    const Vec2 d = points_[i + 1] - a;
    const double seg = cumulative_[i + 1] - cumulative_[i];
    if (seg <= 0.0) continue;
    const Vec2 dir{d.x / seg, d.y / seg};
    const double along = dot(p - a, dir);
    double t = along / seg;
    double overshoot = 0.0;
    double s_ext = cumulative_[i] + along;
    if (t < 0.0) {
      if (i == 0) overshoot = -along;
      t = 0.0;
    } else if (t > 1.0) {
      if (i == last_seg) overshoot = along - seg;
      t = 1.0;
    }
    if (overshoot == 0.0) s_ext = cumulative_[i] + t * seg;
    const Vec2 q = a + (t * seg) * dir;
    const double dist = distance(p, q);
    if (dist < best.distance) {
      best.distance = dist;
      best.s = cumulative_[i] + t * seg;
      best.s_extended = s_ext;
      best.overshoot = overshoot;
      if (overshoot > 0.0) {
        best.lateral = cross(dir, p - q);
      } else {
        const double side = cross(dir, p - q);
        best.lateral = side >= 0.0 ? dist : -dist;
      }
    }
  }
  return best;
}

Polyline Polyline::resampled(std::size_t segments) const {
  segments = std::max<std::size_t>(segments, 1);
  std::vector<Vec2> out;
  out.reserve(segments + 1);
  const double len = length();
  for (std::size_t i = 0; i <= segments; ++i) {
    const double s = len * static_cast<double>(i) / static_cast<double>(segments);
    out.push_back(i == segments ? points_.back() : point_at(s));
  }
  return Polyline(std::move(out));
}

// ---------------------------------------------------------------- Lanelet

double Lanelet::half_width_at(double s) const {
  if (half_widths.empty()) return 0.0;
  const double len = centerline.length();
  if (len <= 0.0 || half_widths.size() == 1) return half_widths.front();
  const double pos = std::clamp(s / len, 0.0, 1.0) *
                     static_cast<double>(half_widths.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), half_widths.size() - 2);
  const double t = pos - static_cast<double>(i);
  return (1.0 - t) * half_widths[i] + t * half_widths[i + 1];
}

std::string_view to_string(PathStrategy strategy) {
  switch (strategy) {
    case PathStrategy::Keep: return "keep";
    case PathStrategy::MergeLeft: return "merge_left";
    case PathStrategy::MergeRight: return "merge_right";
  }
  return "keep";
}

// ---------------------------------------------------------------- LaneletMap

LaneletMap::LaneletMap(std::vector<Lanelet> lanelets)
    : lanelets_(std::move(lanelets)) {
  if (lanelets_.empty()) schema("map has no lanelets");
  std::sort(lanelets_.begin(), lanelets_.end(),
            [](const Lanelet& a, const Lanelet& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < lanelets_.size(); ++i) {
    if (lanelets_[i].id == lanelets_[i - 1].id) {
      schema("duplicate lanelet id " + std::to_string(lanelets_[i].id));
    }
  }
  for (Lanelet& ll : lanelets_) {
    const std::string where = "lanelet " + std::to_string(ll.id);
    if (!(ll.speed_limit > 0.0) || !std::isfinite(ll.speed_limit)) {
      schema(where + ": speed_limit must be positive");
    }
    for (int s : ll.successors) {
      if (!find(s)) schema(where + ": unknown successor " + std::to_string(s));
    }
    for (const auto& adj : {ll.adjacent_left, ll.adjacent_right}) {
      if (adj && !find(*adj)) {
        schema(where + ": unknown adjacent lanelet " + std::to_string(*adj));
      }
      if (adj && *adj == ll.id) schema(where + ": adjacent to itself");
    }
    if (ll.taper_start_s.has_value() != ll.taper_end_s.has_value()) {
      schema(where + ": taper_start_s and taper_end_s must be set together");
    }
    derive_geometry(ll);
    if (ll.feeds_closure()) {
      const double len = ll.centerline.length();
      if (!(*ll.taper_start_s >= 0.0 && *ll.taper_start_s < *ll.taper_end_s &&
            *ll.taper_end_s <= len + 1e-6)) {
        schema(where + ": taper must satisfy 0 <= start < end <= length");
      }
    }
  }
  for (const Lanelet& ll : lanelets_) {
    if (ll.adjacent_left) {
      const Lanelet& other = at(*ll.adjacent_left);
      if (other.adjacent_right != ll.id) {
        throw Error(ErrorCode::AsymmetricAdjacency,
                    "lanelet " + std::to_string(ll.id) + " has left neighbour " +
                        std::to_string(other.id) +
                        " whose right neighbour is not " + std::to_string(ll.id));
      }
    }
    if (ll.adjacent_right) {
      const Lanelet& other = at(*ll.adjacent_right);
      if (other.adjacent_left != ll.id) {
        throw Error(ErrorCode::AsymmetricAdjacency,
                    "lanelet " + std::to_string(ll.id) + " has right neighbour " +
                        std::to_string(other.id) +
                        " whose left neighbour is not " + std::to_string(ll.id));
      }
    }
    if (ll.closed) {
      for (int pred : predecessors(ll.id)) {
        const Lanelet& feeder = at(pred);
        if (!feeder.closed && !feeder.feeds_closure()) {
          schema("closed lanelet " + std::to_string(ll.id) +
                 " requires taper annotations on feeding lanelet " +
                 std::to_string(pred));
        }
      }
    }
  }
}

const Lanelet* LaneletMap::find(int id) const {
  const auto it = std::lower_bound(
      lanelets_.begin(), lanelets_.end(), id,
      [](const Lanelet& ll, int key) { return ll.id < key; });
  return it != lanelets_.end() && it->id == id ? &*it : nullptr;
}

const Lanelet& LaneletMap::at(int id) const {
  const Lanelet* ll = find(id);
  if (!ll) schema("unknown lanelet id " + std::to_string(id));
  return *ll;
}

std::vector<int> LaneletMap::predecessors(int id) const {
  std::vector<int> out;
  for (const Lanelet& ll : lanelets_) {
    if (std::find(ll.successors.begin(), ll.successors.end(), id) !=
        ll.successors.end()) {
      out.push_back(ll.id);
    }
  }
  return out;
}

Vec2 LaneletMap::chain_point(int id, double s) const {
  const Lanelet* ll = &at(id);
  std::set<int> visited{id};
  while (s > ll->centerline.length() && !ll->successors.empty() &&
         visited.insert(ll->successors.front()).second) {
    s -= ll->centerline.length();
    ll = &at(ll->successors.front());
  }
  return ll->centerline.point_at(s);
}

double LaneletMap::chain_heading(int id, double s) const {
  const Lanelet* ll = &at(id);
  std::set<int> visited{id};
  while (s > ll->centerline.length() && !ll->successors.empty() &&
         visited.insert(ll->successors.front()).second) {
    s -= ll->centerline.length();
    ll = &at(ll->successors.front());
  }
  return ll->centerline.heading_at(s);
}

LaneletMap parse_map_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("lanelets") ||
      !doc["lanelets"].is_array()) {
    schema("document must be an object with a 'lanelets' array");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "lanelets") schema("unknown top-level key '" + key + "'");
  }
  std::vector<Lanelet> lanelets;
  for (const json& j : doc["lanelets"]) lanelets.push_back(read_lanelet(j));
  return LaneletMap(std::move(lanelets));
}

LaneletMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open map " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_map_json(buffer.str());
}

LaneProjection project(const LaneletMap& map, Vec2 point, double heading) {
  const Lanelet* best = nullptr;
  Polyline::Projection best_proj;
  double best_score = std::numeric_limits<double>::infinity();
  double best_lane_heading = 0.0;
  for (const Lanelet& ll : map.lanelets()) {
    const auto proj = ll.centerline.project(point);
    if (proj.distance > kProjectionRadius) continue;
    const double lane_heading = ll.centerline.heading_at(proj.s);
    const double mismatch = std::abs(normalize_angle(heading - lane_heading));
    const double score =
        std::abs(proj.lateral) + kHeadingWeight * mismatch + proj.overshoot;
    if (score < best_score) {
      best_score = score;
      best = &ll;
      best_proj = proj;
      best_lane_heading = lane_heading;
    }
  }
  if (!best) {
    throw Error(ErrorCode::OffMap, "point (" + std::to_string(point.x) + ", " +
                                       std::to_string(point.y) +
                                       ") is more than 10 m from every lane");
  }
  if (std::abs(best_proj.lateral) > best->half_width_at(best_proj.s) + 2.0) {
    throw Error(ErrorCode::OffMap,
                "point (" + std::to_string(point.x) + ", " +
                    std::to_string(point.y) + ") lies outside lanelet " +
                    std::to_string(best->id));
  }
  return {best->id, best_proj.s, best_proj.lateral, best_lane_heading};
}

bool strategy_feasible(const LaneletMap& map, int lanelet_id,
                       PathStrategy strategy) {
  const Lanelet& ll = map.at(lanelet_id);
  std::optional<int> target;
  switch (strategy) {
    case PathStrategy::Keep: return true;
    case PathStrategy::MergeLeft: target = ll.adjacent_left; break;
    case PathStrategy::MergeRight: target = ll.adjacent_right; break;
  }
  return target && !map.at(*target).closed;
}

Polyline sample_path(const LaneletMap& map, const LaneProjection& start,
                     PathStrategy strategy, double distance_m,
                     const PathOptions& options) {
  if (!(distance_m > 0.0) || !(options.spacing > 0.0) ||
      !(options.merge_length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "path distance, spacing and merge length must be positive");
  }
  if (!strategy_feasible(map, start.lanelet_id, strategy)) {
    throw Error(ErrorCode::InfeasibleStrategy,
                std::string(to_string(strategy)) + " is not available from lanelet " +
                    std::to_string(start.lanelet_id));
  }
  const Lanelet& source = map.at(start.lanelet_id);
  int target_id = source.id;
  double target_s = start.s;
  if (strategy == PathStrategy::MergeLeft) target_id = *source.adjacent_left;
  if (strategy == PathStrategy::MergeRight) target_id = *source.adjacent_right;

  const Vec2 src0 = map.chain_point(source.id, start.s);
  const Vec2 src_dir = unit(left_normal(map.chain_heading(source.id, start.s)));
  if (target_id != source.id) {
    target_s = map.at(target_id).centerline.project(src0).s_extended;
  }
  const Vec2 tgt0 = map.chain_point(target_id, target_s);
  // Offset of the target centerline from the source centerline, left positive.
  const double target_offset = dot(src_dir, tgt0 - src0);
  const double remaining = target_offset - start.lateral_offset;
  double slope = 0.0;
  if (std::abs(remaining) > 1e-9) {
    slope = std::clamp(options.initial_lateral_slope * options.merge_length /
                           remaining,
                       0.0, 3.0);
  }

  std::vector<Vec2> pts;
  const auto steps = static_cast<std::size_t>(std::ceil(distance_m / options.spacing - 1e-9));
  pts.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double u = std::min(distance_m, static_cast<double>(i) * options.spacing);
    const double sigma = smoothstep_blend(u / options.merge_length, slope);
    const Vec2 src_c = map.chain_point(source.id, start.s + u);
    const Vec2 n = left_normal(map.chain_heading(source.id, start.s + u));
    const Vec2 tgt_c = map.chain_point(target_id, target_s + u);
    const Vec2 displaced = src_c + start.lateral_offset * n;
    pts.push_back((1.0 - sigma) * displaced + sigma * tgt_c);
  }
  return Polyline(std::move(pts));
}

}  // namespace wz
