#include "wzsentinel/conflict.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

#include "wzsentinel/error.hpp"
#include "wzsentinel/trajdata.hpp"

namespace wz {

double consistent_lambda(double dist_threshold, double prob_threshold) {
  return dist_threshold / std::log(1.0 / prob_threshold);
}

void ConflictParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidLambda,
                "lambda must be positive, got " + std::to_string(lambda));
  }
  if (!(dist_threshold > 0.0) || !std::isfinite(dist_threshold)) {
    throw Error(ErrorCode::InvalidThreshold,
                "distance threshold must be positive, got " +
                    std::to_string(dist_threshold));
  }
  if (!(prob_threshold > 0.0 && prob_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidThreshold,
                "probability threshold must lie in (0, 1), got " +
                    std::to_string(prob_threshold));
  }
}

double conflict_probability(double distance_m, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::InvalidLambda,
                "lambda must be positive, got " + std::to_string(lambda));
  }
  if (!(distance_m >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "distance must be non-negative, got " + std::to_string(distance_m));
  }
  return std::exp(-distance_m / lambda);
}

ConflictRecord make_conflict_record(int frame_id, int horizon_step, int track_i,
                                    int track_j, double distance_m,
                                    const ConflictParams& params) {
  ConflictRecord r;
  r.frame_id = frame_id;
  r.horizon_step = horizon_step;
  r.track_i = std::min(track_i, track_j);
  r.track_j = std::max(track_i, track_j);
  r.distance_m = distance_m;
  r.probability = conflict_probability(distance_m, params.lambda);
  r.is_conflict = distance_m < params.dist_threshold;
  r.is_high_risk = r.probability > params.prob_threshold;
  return r;
}

std::vector<ConflictRecord> evaluate_pairs(std::span<const TrackedBox> boxes,
                                           int frame_id, int horizon_step,
                                           const ConflictParams& params) {
  params.validate();
  std::vector<const TrackedBox*> sorted;
  for (const TrackedBox& b : boxes) {
    validate_box(b.box);
    sorted.push_back(&b);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const TrackedBox* a, const TrackedBox* b) {
              return a->track_id < b->track_id;
            });
  std::vector<ConflictRecord> out;
  out.reserve(sorted.size() * (sorted.size() - (sorted.empty() ? 0 : 1)) / 2);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const double d = min_box_distance(sorted[i]->box, sorted[j]->box);
      out.push_back(make_conflict_record(frame_id, horizon_step,
                                         sorted[i]->track_id,
                                         sorted[j]->track_id, d, params));
    }
  }
  return out;
}

std::string_view to_string(ModePolicy policy) {
  switch (policy) {
    case ModePolicy::WorstCase: return "worst_case";
    case ModePolicy::BestMode: return "best_mode";
    case ModePolicy::Expected: return "expected";
  }
  return "worst_case";
}

ModePolicy parse_mode_policy(std::string_view text) {
  if (text == "worst_case") return ModePolicy::WorstCase;
  if (text == "best_mode") return ModePolicy::BestMode;
  if (text == "expected") return ModePolicy::Expected;
  throw Error(ErrorCode::InvalidArgument,
              "unknown mode policy '" + std::string(text) + "'");
}

namespace {

// boxes[mode][step]
using ModeBoxes = std::vector<std::vector<OrientedBox>>;

ModeBoxes agent_boxes(const PredictedAgent& agent) {
  ModeBoxes out(agent.modes.size());
  for (std::size_t m = 0; m < agent.modes.size(); ++m) {
    const auto headings = agent.mode_headings(m);
    out[m].reserve(agent.modes[m].size());
    for (std::size_t t = 0; t < agent.modes[m].size(); ++t) {
      out[m].push_back({agent.modes[m][t], headings[t], agent.length, agent.width});
    }
  }
  return out;
}

double pair_distance(const PredictedAgent& a, const ModeBoxes& ba,
                     const PredictedAgent& b, const ModeBoxes& bb,
                     std::size_t step, ModePolicy policy, double lambda) {
  switch (policy) {
    case ModePolicy::WorstCase: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& ma : ba) {
        for (const auto& mb : bb) {
          best = std::min(best, min_box_distance(ma[step], mb[step]));
        }
      }
      return best;
    }
    case ModePolicy::BestMode:
      return min_box_distance(ba[a.most_probable_mode()][step],
                              bb[b.most_probable_mode()][step]);
    case ModePolicy::Expected: {
      double expected = 0.0;
      double closest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ba.size(); ++i) {
        for (std::size_t j = 0; j < bb.size(); ++j) {
          const double w = a.mode_probs[i] * b.mode_probs[j];
          if (w <= 0.0) continue;
          const double d = min_box_distance(ba[i][step], bb[j][step]);
          closest = std::min(closest, d);
          expected += w * std::exp(-d / lambda);
        }
      }
      // Report the distance whose probability equals the expectation.
      if (expected > 0.0) return std::max(0.0, -lambda * std::log(std::min(expected, 1.0)));
      return closest;
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

WarningReport generate_warnings(std::span<const PredictionSet> predictions,
                                const ConflictParams& params,
                                ModePolicy policy) {
  params.validate();
  WarningReport report;
  for (const PredictionSet& set : predictions) {
    set.validate();
    std::vector<ModeBoxes> boxes;
    boxes.reserve(set.agents.size());
    for (const PredictedAgent& a : set.agents) boxes.push_back(agent_boxes(a));

    std::map<std::pair<int, int>, WarningRecord> first_hit;
    for (int step = 0; step < set.horizon; ++step) {
      for (std::size_t i = 0; i < set.agents.size(); ++i) {
        for (std::size_t j = i + 1; j < set.agents.size(); ++j) {
          const auto& a = set.agents[i];
          const auto& b = set.agents[j];
          const double d = pair_distance(a, boxes[i], b, boxes[j],
                                         static_cast<std::size_t>(step), policy,
                                         params.lambda);
          const ConflictRecord rec = make_conflict_record(
              set.issue_frame, step + 1, a.track_id, b.track_id, d, params);
          if (rec.is_high_risk) {
            first_hit.try_emplace({rec.track_i, rec.track_j},
                                  WarningRecord{rec.frame_id, rec.track_i,
                                                rec.track_j, rec.horizon_step,
                                                rec.distance_m, rec.probability});
          }
          report.conflicts.push_back(rec);
        }
      }
    }
    for (const auto& [pair, w] : first_hit) report.warnings.push_back(w);
  }
  std::stable_sort(report.conflicts.begin(), report.conflicts.end(),
                   [](const ConflictRecord& x, const ConflictRecord& y) {
                     return std::tie(x.frame_id, x.horizon_step, x.track_i, x.track_j) <
                            std::tie(y.frame_id, y.horizon_step, y.track_i, y.track_j);
                   });
  std::stable_sort(report.warnings.begin(), report.warnings.end(),
                   [](const WarningRecord& x, const WarningRecord& y) {
                     return std::tie(x.issue_frame, x.track_i, x.track_j) <
                            std::tie(y.issue_frame, y.track_i, y.track_j);
                   });
  return report;
}

WarningReport generate_warnings(const PredictionSet& predictions,
                                const ConflictParams& params,
                                ModePolicy policy) {
  return generate_warnings(std::span<const PredictionSet>(&predictions, 1),
                           params, policy);
}

void write_conflicts_csv(std::span<const ConflictRecord> records,
                         std::ostream& out) {
  out << kConflictCsvHeader << '\n';
  for (const ConflictRecord& r : records) {
    out << r.frame_id << ',' << r.horizon_step << ',' << r.track_i << ','
        << r.track_j << ',' << format_fixed(r.distance_m, 4) << ','
        << format_fixed(r.probability, 4) << ',' << (r.is_conflict ? 1 : 0)
        << ',' << (r.is_high_risk ? 1 : 0) << '\n';
  }
}

void write_warnings_csv(std::span<const WarningRecord> records,
                        std::ostream& out) {
  out << kWarningCsvHeader << '\n';
  for (const WarningRecord& w : records) {
    out << w.issue_frame << ',' << w.track_i << ',' << w.track_j << ','
        << w.horizon_step << ',' << format_fixed(w.distance_m, 4) << ','
        << format_fixed(w.probability, 4) << '\n';
  }
}

std::vector<ConflictRecord> read_conflicts_csv(std::istream& in,
                                               std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](ErrorCode code, const std::string& what) {
    throw Error(code, std::string(source) + " row " + std::to_string(line_no) +
                          ": " + what);
  };
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyFile, std::string(source) + " is empty");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kConflictCsvHeader) {
    fail(ErrorCode::MissingColumn,
         "header must be " + std::string(kConflictCsvHeader));
  }
  std::vector<ConflictRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto c = rest.find(',');
      f.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (f.size() != 8) fail(ErrorCode::MissingColumn, "expected 8 fields");
    auto num = [&](std::string_view s, auto& v) {
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        fail(ErrorCode::NonNumericField, "'" + std::string(s) + "' is not numeric");
      }
    };
    ConflictRecord r;
    int conflict = 0;
    int high = 0;
    num(f[0], r.frame_id);
    num(f[1], r.horizon_step);
    num(f[2], r.track_i);
    num(f[3], r.track_j);
    num(f[4], r.distance_m);
    num(f[5], r.probability);
    num(f[6], conflict);
    num(f[7], high);
    r.is_conflict = conflict != 0;
    r.is_high_risk = high != 0;
    out.push_back(r);
  }
  return out;
}

std::vector<ConflictRecord> read_conflicts_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_conflicts_csv(in, path.string());
}

}  // namespace wz
