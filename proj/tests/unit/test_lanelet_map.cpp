#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "support.hpp"
#include "wzsentinel/error.hpp"
#include "wzsentinel/lanelet_map.hpp"

using namespace wz;
using nlohmann::json;

namespace {

json lanelet(int id, double y_right, double x0, double x1) {
  return {{"id", id},
          {"left", {{x0, y_right + 3.5}, {x1, y_right + 3.5}}},
          {"right", {{x0, y_right}, {x1, y_right}}},
          {"successors", json::array()},
          {"adjacent_left", nullptr},
          {"adjacent_right", nullptr},
          {"speed_limit", 25.0},
          {"closed", false},
          {"taper_start_s", nullptr},
          {"taper_end_s", nullptr}};
}

ErrorCode load_error(const json& doc) {
  try {
    parse_map_json(doc.dump());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

json two_lanes() {
  json a = lanelet(1, 0.0, 0, 300);
  json b = lanelet(2, -3.5, 0, 300);
  a["adjacent_right"] = 2;
  b["adjacent_left"] = 1;
  return {{"lanelets", {a, b}}};
}

}  // namespace

TEST_SUITE("map") {

TEST_CASE("fixture map loads with symmetric adjacency") {
  const LaneletMap map = load_map(wztest::data_path("maps/workzone_2lane.json"));
  CHECK(map.lanelets().size() == 4);
  CHECK(map.at(1).adjacent_right == 2);
  CHECK(map.at(2).adjacent_left == 1);
  CHECK(map.at(4).closed);
  CHECK(map.at(2).feeds_closure());
  CHECK(map.predecessors(4) == std::vector<int>{2});
}

TEST_CASE("centerline is the boundary midline") {
  const LaneletMap map = parse_map_json(two_lanes().dump());
  const Lanelet& ll = map.at(1);
  for (const Vec2& p : ll.centerline.points()) CHECK(p.y == doctest::Approx(1.75));
  CHECK(ll.centerline.length() == doctest::Approx(300.0).epsilon(0.005));
  CHECK(ll.half_width_at(100) == doctest::Approx(1.75));
}

TEST_CASE("curved lanelet centerline length tracks boundary lengths") {
  // Quarter annulus between radii 100 and 103.5.
  json doc = two_lanes();
  json arc = lanelet(1, 0.0, 0, 1);
  json left = json::array(), right = json::array();
  for (int i = 0; i <= 90; ++i) {
    const double t = i * kPi / 180.0;
    left.push_back({100.0 * std::sin(t), 100.0 - 100.0 * std::cos(t)});
    right.push_back({103.5 * std::sin(t), 100.0 - 103.5 * std::cos(t)});
  }
  arc["left"] = left;
  arc["right"] = right;
  const LaneletMap map = parse_map_json(json{{"lanelets", {arc}}}.dump());
  const double expected = 0.5 * (100.0 + 103.5) * kPi / 2;
  CHECK(std::abs(map.at(1).centerline.length() - expected) / expected < 0.005);
}

TEST_CASE("schema problems") {
  json doc = two_lanes();
  doc["lanelets"][0]["colour"] = "red";
  CHECK(load_error(doc) == ErrorCode::SchemaError);

  doc = two_lanes();
  doc["lanelets"][0].erase("closed");
  CHECK(load_error(doc) == ErrorCode::SchemaError);

  doc = two_lanes();
  doc["lanelets"][1]["adjacent_left"] = nullptr;
  CHECK(load_error(doc) == ErrorCode::AsymmetricAdjacency);

  doc = two_lanes();
  doc["lanelets"][0]["successors"] = {7};
  CHECK(load_error(doc) == ErrorCode::SchemaError);

  doc = two_lanes();
  doc["lanelets"][0]["left"] = {{0, 0}, {300, 3.5}};
  doc["lanelets"][0]["right"] = {{0, 3.5}, {300, 0}};
  CHECK(load_error(doc) == ErrorCode::DegenerateBoundary);

  doc = two_lanes();
  doc["lanelets"][0]["left"] = {{0, 0}};
  CHECK(load_error(doc) == ErrorCode::DegenerateBoundary);

  CHECK_THROWS_AS(parse_map_json("{not json"), Error);
}

TEST_CASE("closure needs taper annotations on the feeder") {
  json doc = two_lanes();
  json closed = lanelet(3, -3.5, 300, 400);
  closed["closed"] = true;
  doc["lanelets"][1]["successors"] = {3};
  doc["lanelets"].push_back(closed);
  CHECK(load_error(doc) == ErrorCode::SchemaError);
  doc["lanelets"][1]["taper_start_s"] = 100.0;
  doc["lanelets"][1]["taper_end_s"] = 300.0;
  CHECK_NOTHROW(parse_map_json(doc.dump()));
  doc["lanelets"][1]["taper_end_s"] = 350.0;
  CHECK(load_error(doc) == ErrorCode::SchemaError);
}

TEST_CASE("projection examples") {
  const LaneletMap map = parse_map_json(two_lanes().dump());
  const LaneProjection on = project(map, {50, 1.75}, 0.0);
  CHECK(on.lanelet_id == 1);
  CHECK(on.s == doctest::Approx(50));
  CHECK(std::abs(on.lateral_offset) < 1e-12);

  const LaneProjection left = project(map, {50, 2.75}, 0.0);
  CHECK(left.lanelet_id == 1);
  CHECK(left.lateral_offset == doctest::Approx(1.0));

  const LaneProjection right = project(map, {50, -2.75}, 0.0);
  CHECK(right.lanelet_id == 2);
  CHECK(right.lateral_offset == doctest::Approx(-1.0));

  // On the shared boundary both scores tie; the lower id wins.
  const LaneProjection tie = project(map, {50, 0.0}, 0.0);
  CHECK(tie.lanelet_id == 1);
  CHECK(tie.lateral_offset == doctest::Approx(-1.75));

  CHECK_THROWS_AS(project(map, {50, 40}, 0.0), Error);
}

TEST_CASE("heading mismatch steers the projection") {
  // Opposing lanes: same geometry distance, reversed direction.
  json a = lanelet(1, 0.0, 0, 300);
  json b = {{"id", 2},
            {"left", {{300, -3.5}, {0, -3.5}}},
            {"right", {{300, 0.0}, {0, 0.0}}},
            {"successors", json::array()},
            {"adjacent_left", nullptr},
            {"adjacent_right", nullptr},
            {"speed_limit", 25.0},
            {"closed", false},
            {"taper_start_s", nullptr},
            {"taper_end_s", nullptr}};
  const LaneletMap map = parse_map_json(json{{"lanelets", {a, b}}}.dump());
  CHECK(project(map, {100, 0.0}, 0.0).lanelet_id == 1);
  CHECK(project(map, {100, 0.0}, kPi).lanelet_id == 2);
}

TEST_CASE("keep path on a straight lane") {
  const LaneletMap map = parse_map_json(two_lanes().dump());
  const LaneProjection start = project(map, {20, 1.75}, 0.0);
  const Polyline path = sample_path(map, start, PathStrategy::Keep, 30.0);
  CHECK(path.length() == doctest::Approx(30.0).epsilon(0.01 / 30));
  for (const Vec2& p : path.points()) CHECK(p.y == doctest::Approx(1.75));
}

TEST_CASE("merge left ends on the left centerline") {
  const LaneletMap map = parse_map_json(two_lanes().dump());
  const LaneProjection start = project(map, {20, -1.75}, 0.0);
  REQUIRE(start.lanelet_id == 2);
  const Polyline path = sample_path(map, start, PathStrategy::MergeLeft, 60.0);
  CHECK(std::abs(path.points().back().y - 1.75) < 0.05);
  CHECK(std::abs(path.point_at(kDefaultMergeLength).y - 1.75) < 0.05);
  // Profile check via projection back onto the map.
  for (double s = 0; s <= kDefaultMergeLength; s += 2.5) {
    const Vec2 p = path.point_at(s);
    const double tau = std::clamp((p.x - 20.0) / kDefaultMergeLength, 0.0, 1.0);
    const double blend = 3 * tau * tau - 2 * tau * tau * tau;
    const double expect_y = -1.75 + 3.5 * blend;
    CHECK(std::abs(p.y - expect_y) < 0.1);
    const LaneProjection back = project(map, p, 0.0);
    const double centre = back.lanelet_id == 1 ? 1.75 : -1.75;
    CHECK(std::abs(back.lateral_offset - (expect_y - centre)) < 0.1);
  }
}

TEST_CASE("initial lateral slope bends the start of a merge") {
  const LaneletMap map = parse_map_json(two_lanes().dump());
  const LaneProjection start = project(map, {20, -1.75}, 0.0);
  PathOptions opts;
  opts.initial_lateral_slope = 0.05;
  const Polyline steep = sample_path(map, start, PathStrategy::MergeLeft, 60.0, opts);
  const Polyline flat = sample_path(map, start, PathStrategy::MergeLeft, 60.0);
  CHECK(steep.point_at(2.0).y > flat.point_at(2.0).y);
  CHECK(std::abs(steep.points().back().y - 1.75) < 0.05);
}

TEST_CASE("feasibility") {
  const LaneletMap map = load_map(wztest::data_path("maps/workzone_2lane.json"));
  CHECK(strategy_feasible(map, 2, PathStrategy::MergeLeft));
  CHECK_FALSE(strategy_feasible(map, 2, PathStrategy::MergeRight));
  CHECK(strategy_feasible(map, 1, PathStrategy::MergeRight));
  CHECK_FALSE(strategy_feasible(map, 3, PathStrategy::MergeRight));
  CHECK_FALSE(strategy_feasible(map, 3, PathStrategy::MergeLeft));
  const LaneProjection start = project(map, {20, -1.75}, 0.0);
  CHECK_THROWS_AS(sample_path(map, start, PathStrategy::MergeRight, 30.0), Error);
}

}
