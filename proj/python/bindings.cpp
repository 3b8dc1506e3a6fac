#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wzsentinel/conflict.hpp"
#include "wzsentinel/metrics.hpp"
#include "wzsentinel/pipeline.hpp"
#include "wzsentinel/predict.hpp"
#include "wzsentinel/sim.hpp"
#include "wzsentinel/trajdata.hpp"

namespace py = pybind11;
using namespace wz;

namespace {

std::string case_to_csv(const ScenarioCase& c) {
  std::ostringstream out;
  write_case_csv(c, out);
  return out.str();
}

ScenarioCase case_from_csv(const std::string& text, int case_id) {
  std::istringstream in(text);
  return parse_case_csv(in, case_id, "<string>");
}

py::tuple cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"wz-sentinel"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int rc = 0;
  {
    py::gil_scoped_release release;
    rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  }
  return py::make_tuple(rc, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_wzsentinel, m) {
  m.doc() = "Work-zone conflict forecasting core";
  m.attr("__version__") = WZ_VERSION;

  // The module keeps the type alive; errors carry their code as `.code`.
  static PyObject* error_type = py::exception<Error>(m, "WzError").ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def(py::init([](py::tuple t) {
        if (t.size() != 2) throw py::value_error("expected (x, y)");
        return Vec2{t[0].cast<double>(), t[1].cast<double>()};
      }))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("__iter__", [](const Vec2& v) { return py::iter(py::make_tuple(v.x, v.y)); })
      .def("__eq__", [](const Vec2& a, const Vec2& b) { return a == b; })
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + py::repr(py::float_(v.x)).cast<std::string>() + ", " +
               py::repr(py::float_(v.y)).cast<std::string>() + ")";
      });
  py::implicitly_convertible<py::tuple, Vec2>();

  py::class_<OrientedBox>(m, "OrientedBox")
      .def(py::init([](double x, double y, double heading, double length, double width) {
             return OrientedBox{{x, y}, heading, length, width};
           }),
           py::arg("x"), py::arg("y"), py::arg("heading"), py::arg("length"), py::arg("width"))
      .def_readwrite("center", &OrientedBox::center)
      .def_readwrite("heading", &OrientedBox::heading)
      .def_readwrite("length", &OrientedBox::length)
      .def_readwrite("width", &OrientedBox::width);
  m.def("min_box_distance", &min_box_distance, py::arg("a"), py::arg("b"));

  m.attr("DEFAULT_DIST_THRESHOLD") = kDefaultDistThreshold;
  m.attr("DEFAULT_PROB_THRESHOLD") = kDefaultProbThreshold;
  m.def("consistent_lambda", &consistent_lambda, py::arg("dist_threshold") = kDefaultDistThreshold,
        py::arg("prob_threshold") = kDefaultProbThreshold);
  m.def("conflict_probability", &conflict_probability, py::arg("distance_m"),
        py::arg("lambda_") = ConflictParams{}.lambda);

  m.def("ade", [](const Trajectory& p, const Trajectory& t) { return ade(p, t); });
  m.def("fde", [](const Trajectory& p, const Trajectory& t) { return fde(p, t); });

  py::enum_<AgentType>(m, "AgentType").value("CAR", AgentType::Car).value("TRUCK", AgentType::Truck);

  py::class_<TrackPoint>(m, "TrackPoint")
      .def(py::init<>())
      .def_readwrite("track_id", &TrackPoint::track_id)
      .def_readwrite("timestamp_ms", &TrackPoint::timestamp_ms)
      .def_readwrite("frame_id", &TrackPoint::frame_id)
      .def_readwrite("agent_type", &TrackPoint::agent_type)
      .def_readwrite("x", &TrackPoint::x)
      .def_readwrite("y", &TrackPoint::y)
      .def_readwrite("vx", &TrackPoint::vx)
      .def_readwrite("vy", &TrackPoint::vy)
      .def_readwrite("psi_rad", &TrackPoint::psi_rad)
      .def_readwrite("length", &TrackPoint::length)
      .def_readwrite("width", &TrackPoint::width);

  py::class_<VehicleTrack>(m, "VehicleTrack")
      .def_readonly("track_id", &VehicleTrack::track_id)
      .def_readonly("agent_type", &VehicleTrack::agent_type)
      .def_readonly("points", &VehicleTrack::points);

  py::class_<ScenarioCase>(m, "ScenarioCase")
      .def_readonly("case_id", &ScenarioCase::case_id)
      .def_readonly("tracks", &ScenarioCase::tracks)
      .def("max_frame", &ScenarioCase::max_frame)
      .def("row_count", &ScenarioCase::row_count)
      .def("to_csv", &case_to_csv);
  m.def("load_case", py::overload_cast<const std::filesystem::path&>(&parse_case_csv), py::arg("path"));
  m.def("parse_case", &case_from_csv, py::arg("text"), py::arg("case_id"));
  m.def("write_case", py::overload_cast<const ScenarioCase&, const std::filesystem::path&>(&write_case_csv),
        py::arg("case"), py::arg("path"));

  py::class_<WindowAgent>(m, "WindowAgent")
      .def_readonly("track_id", &WindowAgent::track_id)
      .def_readonly("history", &WindowAgent::history)
      .def_readonly("future_truth", &WindowAgent::future_truth);
  py::class_<ObservationWindow>(m, "ObservationWindow")
      .def_readonly("case_id", &ObservationWindow::case_id)
      .def_readonly("start_frame", &ObservationWindow::start_frame)
      .def_readonly("agents", &ObservationWindow::agents)
      .def("issue_frame", &ObservationWindow::issue_frame);
  m.def("extract_windows", &extract_windows, py::arg("case"), py::arg("history_len") = 10,
        py::arg("future_len") = 30);

  py::class_<LaneletMap>(m, "LaneletMap");
  m.def("load_map", &load_map, py::arg("path"));

  py::class_<PredictedAgent>(m, "PredictedAgent")
      .def_readonly("track_id", &PredictedAgent::track_id)
      .def_readonly("modes", &PredictedAgent::modes)
      .def_readonly("mode_probs", &PredictedAgent::mode_probs);
  py::class_<PredictionSet>(m, "PredictionSet")
      .def_readonly("case_id", &PredictionSet::case_id)
      .def_readonly("issue_frame", &PredictionSet::issue_frame)
      .def_readonly("num_modes", &PredictionSet::num_modes)
      .def_readonly("horizon", &PredictionSet::horizon)
      .def_readonly("agents", &PredictionSet::agents);
  m.def(
      "predict",
      [](const std::string& kind, const ObservationWindow& window, const LaneletMap* map, int modes,
         int horizon) {
        PredictorConfig config;
        config.modes = modes;
        config.horizon = horizon;
        return predict(parse_predictor_kind(kind), window, map, config);
      },
      py::arg("kind"), py::arg("window"), py::arg("map") = nullptr, py::arg("modes") = 6,
      py::arg("horizon") = 30);

  py::class_<SimConfig>(m, "SimConfig")
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("n_cases", &SimConfig::n_cases)
      .def_readwrite("inflow_per_lane", &SimConfig::inflow_per_lane)
      .def_readwrite("truck_fraction", &SimConfig::truck_fraction)
      .def("digest", &SimConfig::digest)
      .def("to_text", &SimConfig::to_text);
  m.def("load_sim_config", &load_sim_config, py::arg("path"));
  m.def("parse_sim_config", &parse_sim_config, py::arg("text"));
  m.def("run_case", &run_case, py::arg("config"), py::arg("map"), py::arg("case_id"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<ConflictRecord>(m, "ConflictRecord")
      .def_readonly("frame_id", &ConflictRecord::frame_id)
      .def_readonly("horizon_step", &ConflictRecord::horizon_step)
      .def_readonly("track_i", &ConflictRecord::track_i)
      .def_readonly("track_j", &ConflictRecord::track_j)
      .def_readonly("distance_m", &ConflictRecord::distance_m)
      .def_readonly("probability", &ConflictRecord::probability)
      .def_readonly("is_conflict", &ConflictRecord::is_conflict)
      .def_readonly("is_high_risk", &ConflictRecord::is_high_risk);
  py::class_<WarningRecord>(m, "WarningRecord")
      .def_readonly("issue_frame", &WarningRecord::issue_frame)
      .def_readonly("track_i", &WarningRecord::track_i)
      .def_readonly("track_j", &WarningRecord::track_j)
      .def_readonly("horizon_step", &WarningRecord::horizon_step)
      .def_readonly("distance_m", &WarningRecord::distance_m)
      .def_readonly("probability", &WarningRecord::probability);
  m.def(
      "generate_warnings",
      [](const std::vector<PredictionSet>& sets, double lambda, double dist_threshold,
         double prob_threshold, const std::string& policy) {
        ConflictParams params;
        params.lambda = lambda;
        params.dist_threshold = dist_threshold;
        params.prob_threshold = prob_threshold;
        WarningReport r = generate_warnings(sets, params, parse_mode_policy(policy));
        return py::make_tuple(std::move(r.conflicts), std::move(r.warnings));
      },
      py::arg("predictions"), py::arg("lambda_") = ConflictParams{}.lambda,
      py::arg("dist_threshold") = kDefaultDistThreshold, py::arg("prob_threshold") = kDefaultProbThreshold,
      py::arg("mode_policy") = "worst_case");

  m.def("run_cli", &cli, py::arg("args"),
        "Runs the command line with `args` (without the program name); returns (status, stdout, stderr).");
}
