#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wzsentinel/conflict.hpp"
#include "wzsentinel/pipeline.hpp"
#include "wzsentinel/report.hpp"
#include "wzsentinel/sim.hpp"

#ifndef WZ_VERSION
#define WZ_VERSION "0.0.0"
#endif

namespace wz {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "cannot create directory " + dir.string());
  }
}

void append_manifest(const fs::path& dir, const std::string& subcommand,
                     const ordered_json& config, const ordered_json& inputs,
                     const std::vector<std::string>& outputs, double seconds) {
  ordered_json line;
  line["subcommand"] = subcommand;
  line["version"] = WZ_VERSION;
  line["config"] = config;
  line["inputs"] = inputs;
  line["outputs"] = outputs;
  line["duration_s"] = std::round(seconds * 1e6) / 1e6;
  std::ofstream out(dir / kRunManifestFile, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to run manifest in " + dir.string());
  out << line.dump() << '\n';
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SimulateArgs {
  std::string config, map, out;
  std::optional<int> cases;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig config = load_sim_config(a.config);
  if (a.cases) config.n_cases = *a.cases;
  if (a.seed) config.seed = *a.seed;
  config.validate();
  const LaneletMap map = load_map(a.map);
  const DatasetSummary summary = run_dataset(config, map, a.out);

  std::vector<std::string> outputs;
  for (const DatasetEntry& e : summary.cases) outputs.push_back(e.file);
  outputs.push_back(summary.manifest.filename().string());
  ordered_json cfg;
  cfg["config_digest"] = summary.config_digest;
  cfg["seed"] = config.seed;
  cfg["n_cases"] = config.n_cases;
  append_manifest(a.out, "simulate", cfg, {{"config", a.config}, {"map", a.map}}, outputs,
                  elapsed(t0));
  out << "wrote " << summary.cases.size() << " cases to " << a.out << '\n';
  return 0;
}

struct PredictArgs {
  std::string cases, map, predictor = "cv", out;
  int modes = 6, horizon = 30, history = 10;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  PredictRunOptions options;
  options.kind = parse_predictor_kind(a.predictor);
  options.config.modes = a.modes;
  options.config.horizon = a.horizon;
  options.history_len = a.history;
  options.config.validate();
  std::optional<LaneletMap> map;
  if (!a.map.empty()) map.emplace(load_map(a.map));
  const auto files = predict_directory(a.cases, map ? &*map : nullptr, options, a.out);

  ordered_json cfg;
  cfg["predictor"] = a.predictor;
  cfg["modes"] = a.modes;
  cfg["horizon"] = a.horizon;
  cfg["history"] = a.history;
  std::vector<std::string> outputs = files;
  outputs.emplace_back(kPredictionIndexFile);
  append_manifest(a.out, "predict", cfg, {{"cases", a.cases}, {"map", a.map}}, outputs,
                  elapsed(t0));
  out << "wrote " << files.size() << " prediction files to " << a.out << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string preds, gt, out;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = evaluate_directory(a.preds, a.gt);
  const fs::path target(a.out);
  const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
  make_dir(dir);
  std::ostringstream csv;
  write_metrics_csv(rows, csv);
  write_file(target, csv.str());
  append_manifest(dir, "evaluate", ordered_json::object(),
                  {{"preds", a.preds}, {"gt", a.gt}}, {target.filename().string()},
                  elapsed(t0));
  out << "evaluated " << rows.size() << " cases into " << a.out << '\n';
  return 0;
}

struct WarnArgs {
  std::string preds, out, policy = "worst_case";
  std::optional<double> lambda;
  double dist = kDefaultDistThreshold;
  double prob = kDefaultProbThreshold;
};

int cmd_warn(const WarnArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  ConflictParams params;
  params.dist_threshold = a.dist;
  params.prob_threshold = a.prob;
  params.lambda = a.lambda ? *a.lambda : consistent_lambda(kDefaultDistThreshold,
                                                           kDefaultProbThreshold);
  params.validate();
  const ModePolicy policy = parse_mode_policy(a.policy);
  const PredictionDir preds = load_prediction_dir(a.preds);

  std::map<int, std::vector<PredictionSet>> by_case;
  for (const PredictionSet& s : preds.sets) by_case[s.case_id].push_back(s);
  make_dir(a.out);
  std::vector<std::string> outputs;
  std::size_t n_warnings = 0;
  for (const auto& [case_id, sets] : by_case) {
    const WarningReport report = generate_warnings(sets, params, policy);
    n_warnings += report.warnings.size();
    const fs::path rel =
        by_case.size() == 1 ? fs::path() : fs::path("case_" + std::to_string(case_id));
    make_dir(fs::path(a.out) / rel);
    std::ostringstream conflicts;
    write_conflicts_csv(report.conflicts, conflicts);
    write_file(fs::path(a.out) / rel / "conflicts.csv", conflicts.str());
    std::ostringstream warnings;
    write_warnings_csv(report.warnings, warnings);
    write_file(fs::path(a.out) / rel / "warnings.csv", warnings.str());
    outputs.push_back((rel / "conflicts.csv").generic_string());
    outputs.push_back((rel / "warnings.csv").generic_string());
  }

  ordered_json cfg;
  cfg["lambda"] = params.lambda;
  cfg["dist_threshold"] = params.dist_threshold;
  cfg["prob_threshold"] = params.prob_threshold;
  cfg["mode_policy"] = a.policy;
  append_manifest(a.out, "warn", cfg, {{"preds", a.preds}}, outputs, elapsed(t0));
  out << "issued " << n_warnings << " warnings into " << a.out << '\n';
  return 0;
}

struct ReportArgs {
  std::string conflicts, out, preds, gt;
  std::vector<int> pair;
  double dist = kDefaultDistThreshold;
  double prob = kDefaultProbThreshold;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<ConflictRecord> records = read_conflicts_csv(a.conflicts);
  ScatterOptions options;
  options.dist_threshold = a.dist;
  options.prob_threshold = a.prob;
  if (!a.pair.empty()) {
    records = pair_records(records, a.pair[0], a.pair[1]);
    if (records.empty()) {
      throw Error(ErrorCode::InvalidArgument, "pair (" + std::to_string(a.pair[0]) + ", " +
                                                  std::to_string(a.pair[1]) +
                                                  ") has no conflict records");
    }
    options.title += " (vehicles " + std::to_string(std::min(a.pair[0], a.pair[1])) +
                     " and " + std::to_string(std::max(a.pair[0], a.pair[1])) + ")";
  }
  make_dir(a.out);
  std::vector<std::string> outputs;
  write_file(fs::path(a.out) / "probability_vs_distance.svg",
             probability_scatter_svg(records, options));
  outputs.emplace_back("probability_vs_distance.svg");
  const auto close = below_threshold(records, a.dist);
  ScatterOptions filtered = options;
  filtered.title += ", distance below threshold";
  write_file(fs::path(a.out) / "probability_vs_distance_filtered.svg",
             probability_scatter_svg(close, filtered));
  outputs.emplace_back("probability_vs_distance_filtered.svg");

  if (!a.preds.empty()) {
    const PredictionDir preds = load_prediction_dir(a.preds);
    std::map<int, ScenarioCase> cases;
    for (const PredictionSet& set : preds.sets) {
      const ScenarioCase* truth = nullptr;
      if (!a.gt.empty()) {
        auto it = cases.find(set.case_id);
        if (it == cases.end()) {
          it = cases.emplace(set.case_id,
                             parse_case_csv(fs::path(a.gt) / case_file_name(set.case_id)))
                   .first;
        }
        truth = &it->second;
      }
      const std::string name = "trajectories_case_" + std::to_string(set.case_id) + "_f" +
                               std::to_string(set.issue_frame) + ".svg";
      write_file(fs::path(a.out) / name,
                 trajectory_overlay_svg(set, truth, preds.history_len));
      outputs.push_back(name);
    }
  }

  ordered_json cfg;
  cfg["dist_threshold"] = a.dist;
  cfg["prob_threshold"] = a.prob;
  if (!a.pair.empty()) cfg["pair"] = a.pair;
  append_manifest(a.out, "report", cfg,
                  {{"conflicts", a.conflicts}, {"preds", a.preds}, {"gt", a.gt}}, outputs,
                  elapsed(t0));
  out << "wrote " << outputs.size() << " report files to " << a.out << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Work-zone conflict forecasting toolkit", "wz-sentinel"};
  app.set_version_flag("--version", std::string("wz-sentinel ") + WZ_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate ground-truth cases");
  simulate->add_option("--config", sim.config, "Simulator config file")->required();
  simulate->add_option("--map", sim.map, "Lanelet map JSON")->required();
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--cases", sim.cases, "Number of cases (overrides config)");
  simulate->add_option("--seed", sim.seed, "Seed (overrides config)");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Forecast every window of every case");
  predict_cmd->add_option("--cases", pred.cases, "Directory of case CSVs")->required();
  predict_cmd->add_option("--map", pred.map, "Lanelet map JSON (needed for maneuver)");
  predict_cmd->add_option("--predictor", pred.predictor, "cv | ctrv | maneuver")
      ->check(CLI::IsMember({"cv", "ctrv", "maneuver"}));
  predict_cmd->add_option("--modes", pred.modes, "Modes per vehicle (K)");
  predict_cmd->add_option("--horizon", pred.horizon, "Future frames (F)");
  predict_cmd->add_option("--history", pred.history, "Observed frames (H)");
  predict_cmd->add_option("--out", pred.out, "Output directory")->required();

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand("evaluate", "ADE/FDE and joint metrics");
  evaluate->add_option("--preds", eval.preds, "Prediction directory")->required();
  evaluate->add_option("--gt", eval.gt, "Ground-truth case directory")->required();
  evaluate->add_option("--out", eval.out, "Metrics CSV path")->required();

  WarnArgs warn;
  auto* warn_cmd = app.add_subcommand("warn", "Pairwise conflicts and warnings");
  warn_cmd->add_option("--preds", warn.preds, "Prediction directory")->required();
  warn_cmd->add_option("--lambda", warn.lambda, "Decay constant in meters");
  warn_cmd->add_option("--dist-threshold", warn.dist, "Distance threshold (m)");
  warn_cmd->add_option("--prob-threshold", warn.prob, "Probability threshold");
  warn_cmd->add_option("--mode-policy", warn.policy, "worst_case | best_mode | expected")
      ->check(CLI::IsMember({"worst_case", "best_mode", "expected"}));
  warn_cmd->add_option("--out", warn.out, "Output directory")->required();

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "SVG figures");
  report->add_option("--conflicts", rep.conflicts, "conflicts.csv")->required();
  report->add_option("--pair", rep.pair, "Restrict to one vehicle pair")->expected(2);
  report->add_option("--preds", rep.preds, "Prediction directory for trajectory overlays");
  report->add_option("--gt", rep.gt, "Ground-truth case directory for overlays");
  report->add_option("--dist-threshold", rep.dist, "Distance threshold (m)");
  report->add_option("--prob-threshold", rep.prob, "Probability threshold");
  report->add_option("--out", rep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (predict_cmd->parsed()) return cmd_predict(pred, out);
    if (evaluate->parsed()) return cmd_evaluate(eval, out);
    if (warn_cmd->parsed()) return cmd_warn(warn, out);
    if (report->parsed()) return cmd_report(rep, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace wz
