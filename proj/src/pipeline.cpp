#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wzsentinel/pipeline.hpp"
#include "wzsentinel/sim.hpp"
#include "wzsentinel/trajdata.hpp"

namespace wz {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
  }
}

[[noreturn]] void index_error(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::SchemaError, path.string() + ": " + what);
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
      return 2;
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumericField:
    case ErrorCode::InvalidField:
    case ErrorCode::FrameOutOfRange:
    case ErrorCode::TimestampMismatch:
    case ErrorCode::NonContiguousTrackIds:
    case ErrorCode::DuplicateFrame:
    case ErrorCode::FrameGap:
    case ErrorCode::EmptyFile:
    case ErrorCode::BadFileName:
    case ErrorCode::SchemaError:
    case ErrorCode::AsymmetricAdjacency:
    case ErrorCode::DegenerateBoundary:
    case ErrorCode::InvalidShape:
      return 3;
    case ErrorCode::LengthMismatch:
    case ErrorCode::ModeCountMismatch:
    case ErrorCode::VehicleMismatch:
      return 4;
    default:
      return 1;
  }
}

std::vector<std::filesystem::path> list_case_files(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  }
  std::vector<std::pair<int, std::filesystem::path>> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("trajectory_data_case_", 0) != 0 || entry.path().extension() != ".csv") {
      continue;
    }
    found.emplace_back(case_id_from_path(entry.path()), entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<std::filesystem::path> out;
  for (auto& [id, path] : found) out.push_back(std::move(path));
  return out;
}

std::string prediction_file_name(int case_id, int issue_frame) {
  return "prediction_case_" + std::to_string(case_id) + "_f" +
         std::to_string(issue_frame) + ".csv";
}

std::vector<std::string> predict_directory(const std::filesystem::path& cases_dir,
                                           const LaneletMap* map,
                                           const PredictRunOptions& options,
                                           const std::filesystem::path& out_dir) {
  options.config.validate();
  if (options.history_len < 1) {
    throw Error(ErrorCode::InvalidArgument, "history must be >= 1");
  }
  if (options.kind == PredictorKind::Maneuver && !map) {
    throw Error(ErrorCode::InvalidArgument, "the maneuver predictor needs --map");
  }
  const auto files = list_case_files(cases_dir);
  if (files.empty()) {
    throw Error(ErrorCode::IoError, "no trajectory_data_case_<id>.csv files in " +
                                        cases_dir.string());
  }
  ensure_dir(out_dir);

  // Per case: list of (file name, index entry).
  std::vector<std::vector<std::pair<std::string, ordered_json>>> results(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      try {
        const ScenarioCase scenario = parse_case_csv(files[i]);
        for (const ObservationWindow& w :
             extract_windows(scenario, options.history_len, options.config.horizon)) {
          const PredictionSet set = predict(options.kind, w, map, options.config);
          const std::string name = prediction_file_name(set.case_id, set.issue_frame);
          std::ostringstream csv;
          write_prediction_csv(set, csv);
          write_text(out_dir / name, csv.str());

          ordered_json entry;
          entry["file"] = name;
          entry["case_id"] = set.case_id;
          entry["issue_frame"] = set.issue_frame;
          auto& agents = entry["agents"] = ordered_json::array();
          for (const PredictedAgent& a : set.agents) {
            agents.push_back({{"track_id", a.track_id},
                              {"length", a.length},
                              {"width", a.width},
                              {"origin", {a.origin.x, a.origin.y}},
                              {"origin_heading", a.origin_heading}});
          }
          results[i].emplace_back(name, std::move(entry));
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::min<unsigned>(worker_threads(options.threads),
                                            static_cast<unsigned>(files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ordered_json index;
  index["predictor"] = std::string(to_string(options.kind));
  index["history"] = options.history_len;
  index["horizon"] = options.config.horizon;
  index["modes"] = options.config.modes;
  index["dt"] = options.config.dt;
  auto& list = index["files"] = ordered_json::array();
  std::vector<std::string> names;
  for (auto& per_case : results) {
    for (auto& [name, entry] : per_case) {
      names.push_back(name);
      list.push_back(std::move(entry));
    }
  }
  write_text(out_dir / kPredictionIndexFile, index.dump(2) + "\n");
  return names;
}

PredictionDir load_prediction_dir(const std::filesystem::path& dir) {
  const auto index_path = dir / kPredictionIndexFile;
  ordered_json index;
  try {
    index = ordered_json::parse(read_text(index_path));
  } catch (const nlohmann::json::exception& e) {
    index_error(index_path, e.what());
  }
  PredictionDir out;
  try {
    out.predictor = index.at("predictor").get<std::string>();
    out.history_len = index.at("history").get<int>();
    const double dt = index.at("dt").get<double>();
    for (const auto& entry : index.at("files")) {
      const std::string name = entry.at("file").get<std::string>();
      std::ifstream in(dir / name, std::ios::binary);
      if (!in) throw Error(ErrorCode::IoError, "cannot open " + (dir / name).string());
      PredictionSet set = read_prediction_csv(in, (dir / name).string());
      set.case_id = entry.at("case_id").get<int>();
      set.issue_frame = entry.at("issue_frame").get<int>();
      set.dt = dt;
      const auto& agents = entry.at("agents");
      if (agents.size() != set.agents.size()) {
        throw Error(ErrorCode::InvalidShape,
                    name + ": index lists " + std::to_string(agents.size()) +
                        " vehicles, file has " + std::to_string(set.agents.size()));
      }
      for (const auto& meta : agents) {
        const int id = meta.at("track_id").get<int>();
        auto it = std::find_if(set.agents.begin(), set.agents.end(),
                               [&](const PredictedAgent& a) { return a.track_id == id; });
        if (it == set.agents.end()) {
          throw Error(ErrorCode::InvalidShape,
                      name + ": track " + std::to_string(id) + " missing from file");
        }
        it->length = meta.at("length").get<double>();
        it->width = meta.at("width").get<double>();
        it->origin = {meta.at("origin").at(0).get<double>(),
                      meta.at("origin").at(1).get<double>()};
        it->origin_heading = meta.at("origin_heading").get<double>();
      }
      set.refresh_anchors();
      set.validate();
      out.sets.push_back(std::move(set));
    }
  } catch (const nlohmann::json::exception& e) {
    index_error(index_path, e.what());
  }
  return out;
}

std::vector<CaseMetrics> evaluate_directory(const std::filesystem::path& preds_dir,
                                            const std::filesystem::path& gt_dir) {
  const PredictionDir preds = load_prediction_dir(preds_dir);
  std::map<int, std::vector<MetricReport>> per_case;
  std::map<int, ScenarioCase> cases;
  for (const PredictionSet& set : preds.sets) {
    auto it = cases.find(set.case_id);
    if (it == cases.end()) {
      const auto path = gt_dir / case_file_name(set.case_id);
      if (!std::filesystem::exists(path)) {
        throw Error(ErrorCode::IoError, "missing ground truth " + path.string());
      }
      it = cases.emplace(set.case_id, parse_case_csv(path)).first;
    }
    const int start = set.issue_frame - preds.history_len + 1;
    const auto windows = extract_windows(it->second, preds.history_len, set.horizon);
    auto w = std::find_if(windows.begin(), windows.end(), [&](const ObservationWindow& x) {
      return x.start_frame == start;
    });
    if (w == windows.end()) {
      throw Error(ErrorCode::VehicleMismatch,
                  "case " + std::to_string(set.case_id) + " has no window issued at frame " +
                      std::to_string(set.issue_frame));
    }
    per_case[set.case_id].push_back(joint_metrics(set, truth_from_window(*w)));
  }
  std::vector<CaseMetrics> out;
  for (const auto& [id, reports] : per_case) out.push_back({id, aggregate_reports(reports)});
  return out;
}

void write_metrics_csv(std::span<const CaseMetrics> rows, std::ostream& out) {
  out << "case_id,n_windows,n_agents,ade,fde,min_joint_ade,min_joint_fde\n";
  auto line = [&](const std::string& label, const MetricReport& r) {
    out << label << ',' << r.n_windows << ',' << r.n_agents << ',' << format_fixed(r.ade, 6)
        << ',' << format_fixed(r.fde, 6) << ',' << format_fixed(r.min_joint_ade, 6) << ','
        << format_fixed(r.min_joint_fde, 6) << '\n';
  };
  std::vector<MetricReport> reports;
  for (const CaseMetrics& c : rows) {
    line(std::to_string(c.case_id), c.report);
    reports.push_back(c.report);
  }
  if (!reports.empty()) line("ALL", aggregate_reports(reports));
}

}  // namespace wz
