#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "wzsentinel/error.hpp"
#include "wzsentinel/sim.hpp"

namespace wz {
namespace {

using Field = std::variant<double SimConfig::*, int SimConfig::*,
                           std::uint64_t SimConfig::*>;

struct Key {
  const char* name;
  Field field;
};

// Canonical order; also the order of to_text().
const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"seed", &SimConfig::seed},
      {"n_cases", &SimConfig::n_cases},
      {"case_duration_s", &SimConfig::case_duration_s},
      {"dt", &SimConfig::dt},
      {"warmup_s", &SimConfig::warmup_s},
      {"density_min", &SimConfig::density_min},
      {"density_max", &SimConfig::density_max},
      {"inflow_per_lane", &SimConfig::inflow_per_lane},
      {"speed_limit", &SimConfig::speed_limit},
      {"work_zone_speed_limit", &SimConfig::work_zone_speed_limit},
      {"truck_fraction", &SimConfig::truck_fraction},
      {"speed_jitter", &SimConfig::speed_jitter},
      {"idm_v0", &SimConfig::idm_v0},
      {"idm_T", &SimConfig::idm_T},
      {"idm_a", &SimConfig::idm_a},
      {"idm_b", &SimConfig::idm_b},
      {"idm_s0", &SimConfig::idm_s0},
      {"idm_delta", &SimConfig::idm_delta},
      {"max_decel", &SimConfig::max_decel},
      {"a_lat_max", &SimConfig::a_lat_max},
      {"v_lat_standing", &SimConfig::v_lat_standing},
      {"v_lat_factor", &SimConfig::v_lat_factor},
      {"gap_lead_s", &SimConfig::gap_lead_s},
      {"gap_lag_s", &SimConfig::gap_lag_s},
      {"impatience_time_s", &SimConfig::impatience_time_s},
      {"merge_advance_m", &SimConfig::merge_advance_m},
      {"cooperation_fraction", &SimConfig::cooperation_fraction},
      {"yield_distance_m", &SimConfig::yield_distance_m},
      {"heading_speed_floor", &SimConfig::heading_speed_floor},
  };
  return k;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    config_error("key '" + key + "' has invalid value '" + text + "'");
  }
  return value;
}

}  // namespace

int SimConfig::frames() const {
  return static_cast<int>(std::lround(case_duration_s / dt));
}

void SimConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      config_error(std::string(name) + " must be positive");
    }
  };
  positive(case_duration_s, "case_duration_s");
  positive(dt, "dt");
  if (warmup_s < 0.0) config_error("warmup_s must be non-negative");
  if (n_cases < 1) config_error("n_cases must be >= 1");
  if (std::abs(case_duration_s / dt - kMaxFrames) > 1e-9 ||
      std::abs(dt - kFrameDt) > 1e-12) {
    config_error("dt and case_duration_s must give 40 frames at 10 Hz");
  }
  if (density_min < 2 || density_max < density_min) {
    config_error("density band must satisfy 2 <= density_min <= density_max");
  }
  positive(inflow_per_lane, "inflow_per_lane");
  positive(speed_limit, "speed_limit");
  positive(work_zone_speed_limit, "work_zone_speed_limit");
  if (!(truck_fraction >= 0.0 && truck_fraction <= 1.0)) {
    config_error("truck_fraction must lie in [0, 1]");
  }
  if (!(speed_jitter >= 0.0)) config_error("speed_jitter must be non-negative");
  positive(idm_v0, "idm_v0");
  positive(idm_T, "idm_T");
  positive(idm_a, "idm_a");
  positive(idm_b, "idm_b");
  positive(idm_s0, "idm_s0");
  positive(idm_delta, "idm_delta");
  positive(max_decel, "max_decel");
  positive(a_lat_max, "a_lat_max");
  positive(v_lat_standing, "v_lat_standing");
  if (!(v_lat_factor >= 0.0)) config_error("v_lat_factor must be non-negative");
  // The lateral speed envelope may not shrink faster than a_lat_max allows.
  if (v_lat_factor * max_decel > a_lat_max) {
    config_error("v_lat_factor * max_decel must not exceed a_lat_max");
  }
  positive(gap_lead_s, "gap_lead_s");
  positive(gap_lag_s, "gap_lag_s");
  positive(impatience_time_s, "impatience_time_s");
  if (!(merge_advance_m >= 0.0)) config_error("merge_advance_m must be non-negative");
  if (!(cooperation_fraction >= 0.0 && cooperation_fraction <= 1.0)) {
    config_error("cooperation_fraction must lie in [0, 1]");
  }
  positive(yield_distance_m, "yield_distance_m");
  positive(heading_speed_floor, "heading_speed_floor");
}

std::string SimConfig::to_text() const {
  std::ostringstream out;
  for (const Key& k : keys()) {
    out << k.name << '=';
    std::visit(
        [&](auto member) {
          using T = std::decay_t<decltype(this->*member)>;
          if constexpr (std::is_same_v<T, double>) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", this->*member);
            out << buf;
          } else {
            out << this->*member;
          }
        },
        k.field);
    out << '\n';
  }
  return out.str();
}

std::string SimConfig::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : to_text()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimConfig parse_sim_config(std::string_view text) {
  SimConfig config;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_error("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Key* match = nullptr;
    for (const Key& k : keys()) {
      if (key == k.name) match = &k;
    }
    if (!match) {
      config_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      config_error("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    std::visit(
        [&](auto member) {
          using T = std::decay_t<decltype(config.*member)>;
          config.*member = parse_value<T>(key, value);
        },
        match->field);
  }
  config.validate();
  return config;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_sim_config(buffer.str());
}

}  // namespace wz
