#include "wzsentinel/trajdata.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "wzsentinel/error.hpp"

namespace wz {
namespace {

constexpr int kColumnCount = 11;

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string row_label(std::string_view source, std::size_t line_no) {
  return std::string(source) + " row " + std::to_string(line_no);
}

template <typename T>
T parse_number(std::string_view field, std::string_view column,
               std::string_view source, std::size_t line_no) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw Error(ErrorCode::NonNumericField,
                row_label(source, line_no) + ": column '" +
                    std::string(column) + "' is not numeric: '" +
                    std::string(field) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) {
      throw Error(ErrorCode::NonNumericField,
                  row_label(source, line_no) + ": column '" +
                      std::string(column) + "' is not finite");
    }
  }
  return value;
}

double quantize(double value, int decimals) {
  double parsed = 0.0;
  const std::string text = format_fixed(value, decimals);
  std::from_chars(text.data(), text.data() + text.size(), parsed);
  return parsed;
}

// Rounding can push a heading just outside (-pi, pi]; pull it back one ulp of
// the printed precision so the written value re-parses unchanged.
std::string format_heading(double psi) {
  std::string text = format_fixed(psi, 4);
  const double q = quantize(psi, 4);
  if (q > kPi) text = format_fixed(3.1415, 4);
  if (q <= -kPi) text = format_fixed(-3.1415, 4);
  return text;
}

}  // namespace

std::string_view to_string(AgentType type) {
  return type == AgentType::Truck ? "truck" : "car";
}

AgentType parse_agent_type(std::string_view text) {
  if (text == "car") return AgentType::Car;
  if (text == "truck") return AgentType::Truck;
  throw Error(ErrorCode::InvalidField,
              "agent_type must be 'car' or 'truck', got '" + std::string(text) +
                  "'");
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string text(buf);
  // Never emit a negative zero.
  if (text.front() == '-' &&
      text.find_first_not_of("-0.") == std::string::npos) {
    text.erase(0, 1);
  }
  return text;
}

bool VehicleTrack::present_over(int first, int last) const {
  if (points.empty()) return false;
  return first_frame() <= first && last_frame() >= last;
}

const TrackPoint& VehicleTrack::at_frame(int frame_id) const {
  return points[static_cast<std::size_t>(frame_id - first_frame())];
}

int ScenarioCase::max_frame() const {
  int m = 0;
  for (const auto& [id, track] : tracks) {
    if (!track.points.empty()) m = std::max(m, track.last_frame());
  }
  return m;
}

std::size_t ScenarioCase::row_count() const {
  std::size_t n = 0;
  for (const auto& [id, track] : tracks) n += track.points.size();
  return n;
}

void validate_case(const ScenarioCase& scenario) {
  if (scenario.tracks.empty()) {
    throw Error(ErrorCode::EmptyFile,
                "case " + std::to_string(scenario.case_id) + " has no tracks");
  }
  int expected_id = 1;
  for (const auto& [id, track] : scenario.tracks) {
    if (id != expected_id || track.track_id != id) {
      throw Error(ErrorCode::NonContiguousTrackIds,
                  "track ids must be 1..n; expected " +
                      std::to_string(expected_id) + ", found " +
                      std::to_string(id));
    }
    ++expected_id;
    if (track.points.empty()) {
      throw Error(ErrorCode::EmptyFile,
                  "track " + std::to_string(id) + " has no points");
    }
    int prev_frame = 0;
    for (const TrackPoint& p : track.points) {
      const std::string where = "track " + std::to_string(id) + " frame " +
                                std::to_string(p.frame_id);
      if (p.track_id != id || p.agent_type != track.agent_type) {
        throw Error(ErrorCode::InvalidField,
                    where + ": point does not match its track");
      }
      if (p.frame_id < 1 || p.frame_id > kMaxFrames) {
        throw Error(ErrorCode::FrameOutOfRange,
                    where + ": frame_id outside [1, 40]");
      }
      if (p.timestamp_ms != kFramePeriodMs * p.frame_id) {
        throw Error(ErrorCode::TimestampMismatch,
                    where + ": timestamp_ms " + std::to_string(p.timestamp_ms) +
                        " != 100 * frame_id");
      }
      if (prev_frame != 0 && p.frame_id == prev_frame) {
        throw Error(ErrorCode::DuplicateFrame, where + ": duplicate frame");
      }
      if (prev_frame != 0 && p.frame_id != prev_frame + 1) {
        throw Error(ErrorCode::FrameGap,
                    where + ": gap after frame " + std::to_string(prev_frame));
      }
      if (!(p.length > 0.0) || !(p.width > 0.0)) {
        throw Error(ErrorCode::InvalidField,
                    where + ": length and width must be positive");
      }
      if (!(p.psi_rad > -kPi && p.psi_rad <= kPi)) {
        throw Error(ErrorCode::InvalidField,
                    where + ": psi_rad outside (-pi, pi]");
      }
      prev_frame = p.frame_id;
    }
  }
}

std::string case_file_name(int case_id) {
  return "trajectory_data_case_" + std::to_string(case_id) + ".csv";
}

int case_id_from_path(const std::filesystem::path& path) {
  static const std::regex pattern(R"(trajectory_data_case_([0-9]+)\.csv)");
  const std::string name = path.filename().string();
  std::smatch m;
  if (!std::regex_match(name, m, pattern)) {
    throw Error(ErrorCode::BadFileName,
                "'" + name + "' does not match trajectory_data_case_<id>.csv");
  }
  const int id = std::stoi(m[1].str());
  if (id < 1) {
    throw Error(ErrorCode::BadFileName, "case id must be positive: " + name);
  }
  return id;
}

ScenarioCase parse_case_csv(const std::filesystem::path& path) {
  const int case_id = case_id_from_path(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string());
  }
  return parse_case_csv(in, case_id, path.string());
}

ScenarioCase parse_case_csv(std::istream& in, int case_id,
                            std::string_view source) {
  static const std::vector<std::string_view> kColumns =
      split_csv(kCaseCsvHeader);

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    have_header = true;
  }
  if (!have_header) {
    throw Error(ErrorCode::EmptyFile, std::string(source) + " is empty");
  }
  const auto header = split_csv(line);
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i >= header.size() || header[i] != kColumns[i]) {
      throw Error(ErrorCode::MissingColumn,
                  std::string(source) + ": header column " +
                      std::to_string(i + 1) + " must be '" +
                      std::string(kColumns[i]) + "'");
    }
  }
  if (header.size() != kColumns.size()) {
    throw Error(ErrorCode::MissingColumn,
                std::string(source) + ": header has " +
                    std::to_string(header.size()) + " columns, expected 11");
  }

  std::map<int, std::vector<TrackPoint>> rows;
  std::map<int, std::size_t> first_line_of_track;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != kColumnCount) {
      throw Error(ErrorCode::MissingColumn,
                  row_label(source, line_no) + ": expected 11 fields, got " +
                      std::to_string(f.size()));
    }
    TrackPoint p;
    p.track_id = parse_number<int>(f[0], kColumns[0], source, line_no);
    p.timestamp_ms = parse_number<int>(f[1], kColumns[1], source, line_no);
    p.frame_id = parse_number<int>(f[2], kColumns[2], source, line_no);
    try {
      p.agent_type = parse_agent_type(f[3]);
    } catch (const Error& e) {
      throw Error(ErrorCode::InvalidField,
                  row_label(source, line_no) + ": " + e.what());
    }
    p.x = parse_number<double>(f[4], kColumns[4], source, line_no);
    p.y = parse_number<double>(f[5], kColumns[5], source, line_no);
    p.vx = parse_number<double>(f[6], kColumns[6], source, line_no);
    p.vy = parse_number<double>(f[7], kColumns[7], source, line_no);
    p.psi_rad = normalize_angle(
        parse_number<double>(f[8], kColumns[8], source, line_no));
    p.length = parse_number<double>(f[9], kColumns[9], source, line_no);
    p.width = parse_number<double>(f[10], kColumns[10], source, line_no);

    if (p.track_id < 1) {
      throw Error(ErrorCode::InvalidField,
                  row_label(source, line_no) + ": track_id must be positive");
    }
    if (p.frame_id < 1 || p.frame_id > kMaxFrames) {
      throw Error(ErrorCode::FrameOutOfRange,
                  row_label(source, line_no) + ": frame_id " +
                      std::to_string(p.frame_id) + " outside [1, 40]");
    }
    if (p.timestamp_ms != kFramePeriodMs * p.frame_id) {
      throw Error(ErrorCode::TimestampMismatch,
                  row_label(source, line_no) + ": timestamp_ms " +
                      std::to_string(p.timestamp_ms) + " != 100 * frame_id");
    }
    if (!(p.length > 0.0) || !(p.width > 0.0)) {
      throw Error(ErrorCode::InvalidField,
                  row_label(source, line_no) +
                      ": length and width must be positive");
    }
    first_line_of_track.try_emplace(p.track_id, line_no);
    rows[p.track_id].push_back(p);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyFile,
                std::string(source) + " has no data rows");
  }

  ScenarioCase scenario;
  scenario.case_id = case_id;
  for (auto& [id, points] : rows) {
    std::stable_sort(points.begin(), points.end(),
                     [](const TrackPoint& a, const TrackPoint& b) {
                       return a.frame_id < b.frame_id;
                     });
    VehicleTrack track;
    track.track_id = id;
    track.agent_type = points.front().agent_type;
    for (const TrackPoint& p : points) {
      if (p.agent_type != track.agent_type) {
        throw Error(ErrorCode::InvalidField,
                    std::string(source) + ": track " + std::to_string(id) +
                        " changes agent_type");
      }
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i].frame_id == points[i - 1].frame_id) {
        throw Error(ErrorCode::DuplicateFrame,
                    std::string(source) + ": track " + std::to_string(id) +
                        " repeats frame " + std::to_string(points[i].frame_id));
      }
    }
    track.points = std::move(points);
    scenario.tracks.emplace(id, std::move(track));
  }
  validate_case(scenario);
  return scenario;
}

void write_case_csv(const ScenarioCase& scenario, std::ostream& out) {
  validate_case(scenario);
  out << kCaseCsvHeader << '\n';
  for (const auto& [id, track] : scenario.tracks) {
    for (const TrackPoint& p : track.points) {
      out << p.track_id << ',' << p.timestamp_ms << ',' << p.frame_id << ','
          << to_string(p.agent_type) << ',' << format_fixed(p.x, 4) << ','
          << format_fixed(p.y, 4) << ',' << format_fixed(p.vx, 4) << ','
          << format_fixed(p.vy, 4) << ',' << format_heading(p.psi_rad) << ','
          << format_fixed(p.length, 2) << ',' << format_fixed(p.width, 2)
          << '\n';
    }
  }
}

void write_case_csv(const ScenarioCase& scenario,
                    const std::filesystem::path& path) {
  validate_case(scenario);
  std::ostringstream buffer;
  write_case_csv(scenario, buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }
  out << buffer.str();
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed for " + path.string());
  }
}

std::vector<ObservationWindow> extract_windows(const ScenarioCase& scenario,
                                               int history_len,
                                               int future_len) {
  if (history_len < 1 || future_len < 1) {
    throw Error(ErrorCode::InvalidArgument, "H and F must both be >= 1");
  }
  const int span = history_len + future_len;
  if (span > kMaxFrames) {
    throw Error(ErrorCode::WindowTooLong,
                "H+F=" + std::to_string(span) + " exceeds 40 frames");
  }
  const int max_frame = scenario.max_frame();
  if (span > max_frame) {
    throw Error(ErrorCode::WindowTooLong,
                "H+F=" + std::to_string(span) + " exceeds the " +
                    std::to_string(max_frame) + " frames present");
  }

  std::vector<ObservationWindow> windows;
  for (int start = 1; start + span - 1 <= max_frame; ++start) {
    ObservationWindow w;
    w.case_id = scenario.case_id;
    w.start_frame = start;
    w.history_len = history_len;
    w.future_len = future_len;
    const int last = start + span - 1;
    for (const auto& [id, track] : scenario.tracks) {
      if (!track.present_over(start, last)) continue;
      WindowAgent agent;
      agent.track_id = id;
      agent.agent_type = track.agent_type;
      const TrackPoint& first = track.at_frame(start);
      agent.length = first.length;
      agent.width = first.width;
      for (int f = start; f < start + history_len; ++f) {
        agent.history.push_back(track.at_frame(f));
      }
      for (int f = start + history_len; f <= last; ++f) {
        agent.future_truth.push_back(track.at_frame(f));
      }
      w.agents.push_back(std::move(agent));
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace wz
