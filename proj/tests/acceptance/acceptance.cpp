// Runs the eight acceptance criteria and prints one line per criterion.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "wzsentinel/conflict.hpp"
#include "wzsentinel/error.hpp"
#include "wzsentinel/metrics.hpp"
#include "wzsentinel/predict.hpp"
#include "wzsentinel/report.hpp"
#include "wzsentinel/sim.hpp"

using namespace wz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

SimConfig default_config() { return load_sim_config(wztest::data_path("configs/default.cfg")); }
LaneletMap fixture_map() { return load_map(wztest::data_path("maps/workzone_2lane.json")); }

Outcome calibration() {
  const ConflictParams params;
  const double p7 = conflict_probability(7.0, params.lambda);
  const double p0 = conflict_probability(0.0, params.lambda);
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> d(0.0, 200.0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    double a = d(rng), b = d(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!(conflict_probability(a, params.lambda) > conflict_probability(b, params.lambda))) ++violations;
  }
  return {std::abs(p7 - 0.7) <= 1e-6 && p0 == 1.0 && violations == 0,
          fmt("P(7)=%.9f P(0)=%.1f monotone violations=%d", p7, p0, violations)};
}

Outcome degenerate_boxes() {
  std::mt19937_64 rng(2002);
  std::uniform_real_distribution<double> pos(-500.0, 500.0), ang(-kPi, kPi);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), 0.0, 0.0};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), 0.0, 0.0};
    const double centroid = std::hypot(a.center.x - b.center.x, a.center.y - b.center.y);
    worst = std::max(worst, std::abs(min_box_distance(a, b) - centroid));
  }
  return {worst <= 1e-12, fmt("max |d - centroid| = %.3g", worst)};
}

PredictedAgent metric_agent(int id, std::vector<Trajectory> modes) {
  PredictedAgent a;
  a.track_id = id;
  a.length = 4.5;
  a.width = 1.8;
  a.origin = modes.front().front();
  a.mode_probs.assign(modes.size(), 1.0 / static_cast<double>(modes.size()));
  a.modes = std::move(modes);
  return a;
}

PredictionSet metric_set(std::vector<PredictedAgent> agents) {
  PredictionSet s;
  s.num_modes = static_cast<int>(agents.front().modes.size());
  s.horizon = static_cast<int>(agents.front().modes.front().size());
  s.agents = std::move(agents);
  s.refresh_anchors();
  return s;
}

Outcome metric_identities() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<int> n_dist(1, 6), k_dist(1, 6), f_dist(2, 30);
  std::normal_distribution<double> noise(0.0, 2.0);
  int identity_failures = 0, ordering_failures = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = n_dist(rng), k = k_dist(rng), f = f_dist(rng);
    TruthMap truth;
    std::vector<PredictedAgent> exact, noisy;
    for (int id = 1; id <= n; ++id) {
      Trajectory t;
      for (int s = 0; s < f; ++s) t.push_back({id * 10.0 + s, noise(rng)});
      truth[id] = t;
      exact.push_back(metric_agent(id, std::vector<Trajectory>(static_cast<std::size_t>(k), t)));
      std::vector<Trajectory> modes;
      for (int m = 0; m < k; ++m) {
        Trajectory mode;
        for (const Vec2& p : t) mode.push_back({p.x + noise(rng), p.y + noise(rng)});
        modes.push_back(mode);
      }
      noisy.push_back(metric_agent(id, modes));
    }
    const MetricReport zero = joint_metrics(metric_set(exact), truth);
    if (zero.ade != 0.0 || zero.fde != 0.0 || zero.min_joint_ade != 0.0 || zero.min_joint_fde != 0.0) {
      ++identity_failures;
    }
    const PredictionSet preds = metric_set(noisy);
    const MetricReport r = joint_metrics(preds, truth);
    // Per-mode joint ADE recomputed here: mean over vehicles of mode m's ADE.
    for (int m = 0; m < k; ++m) {
      double sum = 0.0;
      for (const auto& a : preds.agents) {
        const Trajectory& mode = a.modes[static_cast<std::size_t>(m)];
        const Trajectory& t = truth.at(a.track_id);
        double e = 0.0;
        for (std::size_t s = 0; s < t.size(); ++s) e += distance(mode[s], t[s]);
        sum += e / static_cast<double>(t.size());
      }
      if (r.min_joint_ade > sum / n + 1e-12) ++ordering_failures;
    }
  }
  const Trajectory t1{{0, 0}, {1, 0}}, t2{{0, 10}, {1, 10}};
  const Trajectory t1_up{{0, 1}, {1, 1}}, t2_up{{0, 11}, {1, 11}};
  const MetricReport fixture = joint_metrics(
      metric_set({metric_agent(1, {t1, t1_up}), metric_agent(2, {t2_up, t2})}), {{1, t1}, {2, t2}});
  return {identity_failures == 0 && ordering_failures == 0 && fixture.min_joint_ade == 0.5,
          fmt("identity failures=%d ordering failures=%d 2x2 minJointADE=%.17g", identity_failures,
              ordering_failures, fixture.min_joint_ade)};
}

PredictionSet only(const PredictionSet& set, const std::set<int>& ids) {
  PredictionSet out = set;
  out.agents.clear();
  for (const auto& a : set.agents) {
    if (ids.count(a.track_id)) out.agents.push_back(a);
  }
  return out;
}

Outcome predictor_ordering() {
  const SimConfig cfg = default_config();
  const LaneletMap map = fixture_map();
  PredictorConfig pc;
  pc.modes = 6;
  pc.horizon = 30;
  std::vector<MetricReport> lc_cv, lc_man, st_cv, st_man;
  for (int case_id = 1; case_id <= 200; ++case_id) {
    const ScenarioCase c = run_case(cfg, map, case_id);
    for (const ObservationWindow& w : extract_windows(c, 10, 30)) {
      const PredictionSet cv = predict_cv(w, pc);
      const PredictionSet man = predict_maneuver(w, map, pc);
      const TruthMap truth = truth_from_window(w);
      bool lane_change = false;
      std::set<int> straight;
      for (const WindowAgent& a : w.agents) {
        const TrackPoint& first = a.history.front();
        const TrackPoint& last = a.future_truth.back();
        const double dy = std::abs(last.y - first.y);
        const double dv = std::abs(norm(last.velocity()) - norm(first.velocity()));
        if (dy >= 1.0) lane_change = true;
        if (dy < 0.1 && dv < 0.1) straight.insert(a.track_id);
      }
      if (lane_change) {
        lc_cv.push_back(joint_metrics(cv, truth));
        lc_man.push_back(joint_metrics(man, truth));
      }
      if (!straight.empty()) {
        TruthMap sub;
        for (int id : straight) sub[id] = truth.at(id);
        st_cv.push_back(joint_metrics(only(cv, straight), sub));
        st_man.push_back(joint_metrics(only(man, straight), sub));
      }
    }
  }
  if (lc_cv.empty() || st_cv.empty()) return {false, "empty subset"};
  const double a_cv = aggregate_reports(lc_cv).min_joint_ade;
  const double a_man = aggregate_reports(lc_man).min_joint_ade;
  const double s_cv = aggregate_reports(st_cv).min_joint_ade;
  const double s_man = aggregate_reports(st_man).min_joint_ade;
  return {a_man < a_cv && std::abs(s_man - s_cv) <= 0.05,
          fmt("lane-change windows=%zu maneuver %.4f vs cv %.4f; straight windows=%zu maneuver %.4f vs cv %.4f",
              lc_cv.size(), a_man, a_cv, st_cv.size(), s_man, s_cv)};
}

TrackPoint fixture_point(int id, int frame, Vec2 p, Vec2 v) {
  TrackPoint t;
  t.track_id = id;
  t.frame_id = frame;
  t.timestamp_ms = frame * kFramePeriodMs;
  t.x = p.x;
  t.y = p.y;
  t.vx = v.x;
  t.vy = v.y;
  t.psi_rad = std::atan2(v.y, v.x);
  t.length = 4.5;
  t.width = 1.8;
  return t;
}

// A slow vehicle merging out of the closed lane ahead of a faster one in the
// open lane.
Outcome warning_precedes_closest_approach() {
  ScenarioCase c;
  c.case_id = 1;
  for (int id = 1; id <= 2; ++id) c.tracks[id].track_id = id;
  for (int f = 1; f <= kMaxFrames; ++f) {
    const double t = (f - 1) * kFrameDt;
    c.tracks[1].points.push_back(fixture_point(1, f, {170.0 + 20.0 * t, 1.75}, {20.0, 0.0}));
    const double y = std::min(1.75, -1.75 + 0.5 * t);
    c.tracks[2].points.push_back(fixture_point(2, f, {200.0 + 14.0 * t, y}, {14.0, y < 1.75 ? 0.5 : 0.0}));
  }
  validate_case(c);

  int closest_frame = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (int f = 1; f <= kMaxFrames; ++f) {
    const double d = min_box_distance(c.tracks[1].at_frame(f).box(), c.tracks[2].at_frame(f).box());
    if (d < closest) {
      closest = d;
      closest_frame = f;
    }
  }
  const LaneletMap map = fixture_map();
  PredictorConfig pc;
  pc.horizon = 30;
  std::vector<PredictionSet> sets;
  for (const ObservationWindow& w : extract_windows(c, 10, 30)) sets.push_back(predict_maneuver(w, map, pc));
  const WarningReport report = generate_warnings(sets, ConflictParams{});
  bool early = false;
  int first_frame = 0;
  for (const WarningRecord& w : report.warnings) {
    const int frame = w.issue_frame + w.horizon_step;
    if (first_frame == 0) first_frame = frame;
    if (frame < closest_frame) early = true;
  }
  return {early, fmt("warnings=%zu first high-risk frame=%d closest approach frame=%d (%.2f m)",
                     report.warnings.size(), first_frame, closest_frame, closest)};
}

// Corner strictly inside a closed lanelet at or beyond its taper end.
bool inside_closure(const LaneletMap& map, Vec2 p) {
  for (const Lanelet& l : map.lanelets()) {
    if (!l.closed) continue;
    const auto proj = l.centerline.project(p);
    if (proj.overshoot > 0.0) continue;
    if (std::abs(proj.lateral) < l.half_width_at(proj.s) - 1e-6 && proj.s > 1e-6) return true;
  }
  return false;
}

Outcome dataset_contract() {
  const SimConfig cfg = default_config();
  const LaneletMap map = fixture_map();
  int frame_errors = 0, id_errors = 0, count_errors = 0, overlaps = 0, closure = 0;
  for (int case_id = 1; case_id <= 100; ++case_id) {
    const ScenarioCase c = run_case(cfg, map, case_id);
    std::set<int> frames;
    for (const auto& [id, t] : c.tracks) {
      for (const TrackPoint& p : t.points) {
        frames.insert(p.frame_id);
        if (p.timestamp_ms != p.frame_id * kFramePeriodMs) ++frame_errors;
      }
    }
    if (frames.size() != 40 || *frames.begin() != 1 || *frames.rbegin() != 40) ++frame_errors;
    int expected = 1;
    for (const auto& [id, t] : c.tracks) {
      if (id != expected++) ++id_errors;
    }
    const auto n = static_cast<int>(c.tracks.size());
    if (n < 18 || n > 22) ++count_errors;
    for (int f = 1; f <= 40; ++f) {
      std::vector<TrackPoint> present;
      for (const auto& [id, t] : c.tracks) {
        if (t.first_frame() <= f && f <= t.last_frame()) present.push_back(t.at_frame(f));
      }
      for (std::size_t i = 0; i < present.size(); ++i) {
        for (std::size_t j = i + 1; j < present.size(); ++j) {
          if (wztest::boxes_overlap(present[i].box(), present[j].box())) ++overlaps;
        }
        for (const Vec2& corner : box_points(present[i].box())) {
          if (inside_closure(map, corner)) {
            ++closure;
            break;
          }
        }
      }
    }
  }
  return {frame_errors + id_errors + count_errors + overlaps + closure == 0,
          fmt("frame errors=%d id errors=%d count errors=%d overlaps=%d closure violations=%d", frame_errors,
              id_errors, count_errors, overlaps, closure)};
}

Outcome determinism() {
  const SimConfig cfg = default_config();
  const LaneletMap map = fixture_map();
  int csv_diffs = 0;
  for (int case_id : {1, 7, 42}) {
    std::ostringstream a, b;
    write_case_csv(run_case(cfg, map, case_id), a);
    write_case_csv(run_case(cfg, map, case_id), b);
    if (a.str() != b.str()) ++csv_diffs;
  }
  // Thread count must not change the dataset.
  SimConfig small = cfg;
  small.n_cases = 4;
  const auto d1 = wztest::scratch_dir("acceptance_t1");
  const auto d4 = wztest::scratch_dir("acceptance_t4");
  run_dataset(small, map, d1, 1);
  run_dataset(small, map, d4, 4);
  for (int id = 1; id <= 4; ++id) {
    if (wztest::slurp(d1 / case_file_name(id)) != wztest::slurp(d4 / case_file_name(id))) ++csv_diffs;
  }
  if (wztest::slurp(d1 / "manifest.json") != wztest::slurp(d4 / "manifest.json")) ++csv_diffs;

  const ScenarioCase c = run_case(cfg, map, 5);
  const auto windows = extract_windows(c, 10, 30);
  const PredictionSet preds = predict_maneuver(windows.front(), map, PredictorConfig{});
  const WarningReport report = generate_warnings(preds, ConflictParams{});
  int svg_diffs = 0;
  if (probability_scatter_svg(report.conflicts) != probability_scatter_svg(report.conflicts)) ++svg_diffs;
  const auto again = generate_warnings(predict_maneuver(windows.front(), map, PredictorConfig{}), ConflictParams{});
  if (probability_scatter_svg(report.conflicts) != probability_scatter_svg(again.conflicts)) ++svg_diffs;
  if (trajectory_overlay_svg(preds, &c, 10) != trajectory_overlay_svg(preds, &c, 10)) ++svg_diffs;
  return {csv_diffs == 0 && svg_diffs == 0 && !report.conflicts.empty(),
          fmt("csv differences=%d svg differences=%d (records=%zu)", csv_diffs, svg_diffs, report.conflicts.size())};
}

// Classic RK4 on (x, y, heading) with constant speed and yaw rate.
Vec2 rk4(Vec2 start, double v, double heading, double omega, double t_end, int substeps) {
  std::array<double, 3> s{start.x, start.y, heading};
  const double h = t_end / substeps;
  const auto f = [&](const std::array<double, 3>& q) {
    return std::array<double, 3>{v * std::cos(q[2]), v * std::sin(q[2]), omega};
  };
  const auto add = [](std::array<double, 3> q, const std::array<double, 3>& k, double w) {
    for (int i = 0; i < 3; ++i) q[i] += w * k[i];
    return q;
  };
  for (int i = 0; i < substeps; ++i) {
    const auto k1 = f(s);
    const auto k2 = f(add(s, k1, h / 2));
    const auto k3 = f(add(s, k2, h / 2));
    const auto k4 = f(add(s, k3, h));
    for (int j = 0; j < 3; ++j) s[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
  }
  return {s[0], s[1]};
}

Outcome ctrv_oracle() {
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<double> v(0.5, 35.0), w(-1.0, 1.0), th(-kPi, kPi), pos(-100.0, 100.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec2 start{pos(rng), pos(rng)};
    const double vi = v(rng), wi = w(rng), ti = th(rng);
    const Trajectory t = ctrv_rollout(start, vi, ti, wi, 30, 0.1);
    worst = std::max(worst, distance(t.back(), rk4(start, vi, ti, wi, 3.0, 1000)));
  }
  return {worst <= 1e-6, fmt("max endpoint error = %.3g m", worst)};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"conflict probability calibration", 1.0, calibration},
      {"degenerate box distance", 1.0, degenerate_boxes},
      {"metric identities", 1.0, metric_identities},
      {"maneuver vs constant velocity", 300.0, predictor_ordering},
      {"warning precedes closest approach", 10.0, warning_precedes_closest_approach},
      {"simulator dataset contract", 180.0, dataset_contract},
      {"determinism", 60.0, determinism},
      {"ctrv vs numerical integration", 1.0, ctrv_oracle},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < criteria[i].budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %zu %s: %s [%.3f s of %.0f s]\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), secs, criteria[i].budget_s);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
