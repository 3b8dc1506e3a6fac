#include <doctest.h>

#include <json.hpp>
#include <set>
#include <sstream>

#include "support.hpp"
#include "wzsentinel/error.hpp"
#include "wzsentinel/sim.hpp"

using namespace wz;

namespace {

SimConfig default_config() { return load_sim_config(wztest::data_path("configs/default.cfg")); }
LaneletMap fixture_map() { return load_map(wztest::data_path("maps/workzone_2lane.json")); }

// Bisection on the IDM interaction term; independent of idm_desired_gap.
double equilibrium_gap(const IdmParams& p, double v) {
  const double s_star = p.s0 + v * p.T;  // dv = 0
  const double target = 1.0 - std::pow(v / p.v0, p.delta);
  double lo = 1e-6, hi = 1e6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double r = s_star / mid;
    (r * r > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ErrorCode config_error(const std::string& text) {
  try {
    parse_sim_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a config error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("config file parsing") {
  const SimConfig c = default_config();
  CHECK(c.seed == 42);
  CHECK(c.frames() == 40);
  CHECK(c.a_lat_max == 1.0);
  CHECK(parse_sim_config(c.to_text()).to_text() == c.to_text());
  CHECK(parse_sim_config(c.to_text()).digest() == c.digest());
  CHECK(c.digest().size() == 16);

  CHECK(config_error("bogus = 1\n") == ErrorCode::ConfigError);
  CHECK(config_error("seed = 1\nseed = 2\n") == ErrorCode::ConfigError);
  CHECK(config_error("idm_a = fast\n") == ErrorCode::ConfigError);
  CHECK(config_error("dt = 0.2\n") == ErrorCode::ConfigError);
  CHECK(config_error("truck_fraction = 1.5\n") == ErrorCode::ConfigError);
  CHECK(config_error("idm_b = 0\n") == ErrorCode::ConfigError);
  CHECK(config_error("just text\n") == ErrorCode::ConfigError);
  CHECK(config_error("v_lat_factor = 0.5\n") == ErrorCode::ConfigError);
  CHECK_NOTHROW(parse_sim_config("# comment only\n\nseed = 7   # trailing\n"));
  SimConfig other = c;
  other.seed = 43;
  CHECK(other.digest() != c.digest());
}

TEST_CASE("idm free road and equilibrium") {
  IdmParams p;
  CHECK(idm_acceleration(p, p.v0, std::numeric_limits<double>::infinity(), 0.0) == 0.0);
  for (double v : {5.0, 12.0, 20.0, 24.0}) {
    const double s = equilibrium_gap(p, v);
    CHECK(std::abs(idm_acceleration(p, v, s, 0.0)) < 1e-6);
  }
  CHECK(idm_desired_gap(p, 10.0, -50.0) == p.s0);
  CHECK(idm_acceleration(p, 10.0, 5.0, 5.0) < -p.b);
}

TEST_CASE("random streams are reproducible and independent") {
  RandomStream a(1, 2, 0), b(1, 2, 0), c(1, 2, 1), d(1, 3, 0);
  bool differs_stream = false, differs_case = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs_stream |= x != c.uniform();
    differs_case |= x != d.uniform();
  }
  CHECK(differs_stream);
  CHECK(differs_case);
  RandomStream e(5, 5, 5);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) sum += e.exponential(2.0);
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.05));
  double m = 0, m2 = 0;
  for (int i = 0; i < 20000; ++i) {
    const double z = e.normal(1.0, 0.1);
    m += z;
    m2 += z * z;
  }
  m /= 20000;
  CHECK(m == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::sqrt(m2 / 20000 - m * m) == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("road derived from the fixture map") {
  const SimRoad road = SimRoad::from_map(fixture_map());
  REQUIRE(road.lanes.size() == 2);
  CHECK(road.length == doctest::Approx(500.0));
  CHECK(road.lanes[0].center_offset == doctest::Approx(0.0));
  CHECK(road.lanes[1].center_offset == doctest::Approx(-3.5));
  CHECK(road.closed_lane == 1);
  CHECK(road.merge_target_lane == 0);
  CHECK(*road.lanes[1].taper_start_s == doctest::Approx(120.0));
  CHECK(*road.lanes[1].taper_end_s == doctest::Approx(300.0));
  CHECK(road.lanes[1].closed_from_s == doctest::Approx(300.0));
  const Vec2 g = road.to_global(100.0, -3.5);
  CHECK(g.x == doctest::Approx(100.0));
  CHECK(g.y == doctest::Approx(-1.75));
  CHECK(road.nearest_lane(-2.0) == 1);
}

TEST_CASE("map without a closure is rejected") {
  const char* open = R"({"lanelets": [{"id": 1, "left": [[0, 3.5], [100, 3.5]],
    "right": [[0, 0], [100, 0]], "successors": [], "adjacent_left": null,
    "adjacent_right": null, "speed_limit": 25, "closed": false,
    "taper_start_s": null, "taper_end_s": null}]})";
  CHECK_THROWS_AS(SimRoad::from_map(parse_map_json(open)), Error);
}

TEST_CASE("lone vehicle at the desired speed keeps it") {
  SimConfig cfg = default_config();
  cfg.speed_jitter = 0;
  const TrafficModel model(cfg, SimRoad::from_map(fixture_map()));
  World w;
  w.vehicles.push_back(model.make_vehicle(1, AgentType::Car, 0, 10.0, 25.0, 1.0));
  CHECK(model.longitudinal_accel(w, 0) == 0.0);
  const World next = model.step(w, 0.1);
  CHECK(next.vehicles[0].s == doctest::Approx(12.5));
  CHECK(next.vehicles[0].v == 25.0);
}

TEST_CASE("lane change is gradual and bounded") {
  SimConfig cfg = default_config();
  cfg.v_lat_standing = 1.0;
  cfg.v_lat_factor = 0.0;
  const TrafficModel model(cfg, SimRoad::from_map(fixture_map()));
  World w;
  SimVehicle v = model.make_vehicle(1, AgentType::Car, 1, 50.0, 20.0, 1.0);
  w.vehicles.push_back(v);
  int steps = 0;
  double prev_lat_v = 0.0;
  while (steps < 200) {
    w = model.step(w, 0.1);
    ++steps;
    const SimVehicle& s = w.vehicles.front();
    CHECK(std::abs(s.lateral_v) <= 1.0 + 1e-9);
    CHECK(std::abs(s.lateral_v - prev_lat_v) <= 0.1 * cfg.a_lat_max + 1e-9);
    prev_lat_v = s.lateral_v;
    if (s.lane == 0 && !s.target_lane) break;
  }
  CHECK(w.vehicles.front().lateral == doctest::Approx(0.0));
  CHECK(steps * 0.1 >= 3.5);
}

TEST_CASE("recorded heading follows the velocity direction") {
  const SimConfig cfg = default_config();
  const TrafficModel model(cfg, SimRoad::from_map(fixture_map()));
  SimVehicle v = model.make_vehicle(1, AgentType::Truck, 1, 50.0, 20.0, 1.0);
  v.lateral_v = 0.8;
  const TrackPoint p = model.record(v, 7, 3);
  CHECK(p.track_id == 7);
  CHECK(p.timestamp_ms == 300);
  CHECK(p.agent_type == AgentType::Truck);
  CHECK(p.length == kTruckLength);
  CHECK(p.psi_rad == doctest::Approx(std::atan2(0.8, 20.0)));
  CHECK(p.vy == doctest::Approx(0.8));
  v.v = 0.0;
  CHECK(model.record(v, 1, 1).psi_rad == doctest::Approx(std::atan2(0.8, cfg.heading_speed_floor)));
}

TEST_CASE("closed-lane vehicle with no gap waits before the taper end") {
  const SimConfig cfg = default_config();
  const TrafficModel model(cfg, SimRoad::from_map(fixture_map()));
  World w;
  // A dense platoon in the open lane blocks every gap.
  for (int i = 0; i < 25; ++i) {
    w.vehicles.push_back(
        model.make_vehicle(i + 1, AgentType::Car, 0, 300.0 - 7.0 * i, 0.0, 1.0));
  }
  w.vehicles.push_back(model.make_vehicle(100, AgentType::Car, 1, 250.0, 15.0, 1.0));
  for (int k = 0; k < 200; ++k) {
    w = model.step(w, 0.1);
    for (const SimVehicle& v : w.vehicles) {
      if (v.id == 100) CHECK(v.s + 0.5 * v.length <= 300.0 + 1e-9);
    }
  }
}

TEST_CASE("run_case contract") {
  const SimConfig cfg = default_config();
  const LaneletMap map = fixture_map();
  const ScenarioCase a = run_case(cfg, map, 3);
  CHECK_NOTHROW(validate_case(a));
  CHECK(a.max_frame() == 40);
  CHECK(a.tracks.size() >= 18);
  CHECK(a.tracks.size() <= 22);
  std::ostringstream x, y;
  write_case_csv(a, x);
  write_case_csv(run_case(cfg, map, 3), y);
  CHECK(x.str() == y.str());
  std::ostringstream z;
  write_case_csv(run_case(cfg, map, 4), z);
  CHECK(z.str() != x.str());
  // Track ids follow first appearance.
  int prev_first = 0;
  for (const auto& [id, t] : a.tracks) {
    CHECK(t.first_frame() >= prev_first);
    prev_first = t.first_frame();
  }
}

TEST_CASE("unreachable density") {
  SimConfig cfg = default_config();
  cfg.inflow_per_lane = 0.05;
  try {
    run_case(cfg, fixture_map(), 1);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DensityUnreachable);
  }
}

TEST_CASE("recorded lateral motion stays within bounds") {
  const SimConfig cfg = default_config();
  const LaneletMap map = fixture_map();
  for (int id = 1; id <= 10; ++id) {
    const ScenarioCase c = run_case(cfg, map, id);
    for (const auto& [tid, t] : c.tracks) {
      for (std::size_t i = 0; i < t.points.size(); ++i) {
        const TrackPoint& p = t.points[i];
        const double v_long = p.vx;  // straight road along +x
        CHECK(std::abs(p.vy) <= cfg.lateral_speed_limit(v_long) + 1e-6);
        if (i > 0) {
          const double a_lat = (p.vy - t.points[i - 1].vy) / cfg.dt;
          CHECK(std::abs(a_lat) <= cfg.a_lat_max + 1e-3);
        }
      }
    }
  }
}

TEST_CASE("dataset writes cases and a manifest") {
  SimConfig cfg = default_config();
  cfg.n_cases = 3;
  const auto dir = wztest::scratch_dir("sim_dataset");
  const DatasetSummary s = run_dataset(cfg, fixture_map(), dir, 2);
  CHECK(s.cases.size() == 3);
  for (int i = 1; i <= 3; ++i) CHECK(std::filesystem::exists(dir / case_file_name(i)));
  const auto manifest = nlohmann::json::parse(wztest::slurp(dir / "manifest.json"));
  CHECK(manifest["seed"] == 42);
  CHECK(manifest["config_digest"] == cfg.digest());
  CHECK(manifest["cases"].size() == 3);
  for (const auto& e : manifest["cases"]) {
    CHECK(e["n_vehicles"].get<int>() >= cfg.density_min);
    CHECK(e["n_vehicles"].get<int>() <= cfg.density_max);
  }
  const std::string first = wztest::slurp(dir / "manifest.json");
  run_dataset(cfg, fixture_map(), dir, 1);
  CHECK(wztest::slurp(dir / "manifest.json") == first);
  CHECK(cfg.n_cases * cfg.case_duration_s == doctest::Approx(12.0));
  SimConfig full = cfg;
  full.n_cases = 5000;
  CHECK(full.n_cases * full.case_duration_s == doctest::Approx(20000.0));
}

TEST_CASE("worker thread cap") {
  CHECK(worker_threads(3) >= 1);
  setenv("WZ_SENTINEL_THREADS", "1", 1);
  CHECK(worker_threads(8) == 1);
  unsetenv("WZ_SENTINEL_THREADS");
}

}
