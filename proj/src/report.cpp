#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "wzsentinel/report.hpp"

namespace wz {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const {
    return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin);
  }
  double py(double y) const {
    return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
  }
};

void header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' '
      << num(kHeight) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xlabel,
          const std::string& ylabel, int ticks = 5) {
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(f.y0)) << "\" x2=\""
      << num(f.px(f.x1)) << "\" y2=\"" << num(f.py(f.y0)) << "\"/>\n";
  out << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(f.y0)) << "\" x2=\""
      << num(f.px(f.x0)) << "\" y2=\"" << num(f.py(f.y1)) << "\"/>\n";
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int t = 0; t <= ticks; ++t) {
    const double x = f.x0 + (f.x1 - f.x0) * t / ticks;
    const double y = f.y0 + (f.y1 - f.y0) * t / ticks;
    out << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(f.py(f.y0) + 16)
        << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
    out << "<text x=\"" << num(f.px(f.x0) - 6) << "\" y=\"" << num(f.py(y) + 4)
        << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
  }
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
  out << "<text x=\"14\" y=\"" << num(kHeight / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 14 " << num(kHeight / 2) << ")\">" << escape(ylabel)
      << "</text>\n</g>\n";
}

}  // namespace

std::vector<ConflictRecord> below_threshold(std::span<const ConflictRecord> records,
                                            double dist_threshold) {
  std::vector<ConflictRecord> out;
  for (const ConflictRecord& r : records) {
    if (r.distance_m < dist_threshold) out.push_back(r);
  }
  return out;
}

std::vector<ConflictRecord> pair_records(std::span<const ConflictRecord> records,
                                         int track_i, int track_j) {
  const int lo = std::min(track_i, track_j);
  const int hi = std::max(track_i, track_j);
  std::vector<ConflictRecord> out;
  for (const ConflictRecord& r : records) {
    if (r.track_i == lo && r.track_j == hi) out.push_back(r);
  }
  return out;
}

std::string probability_scatter_svg(std::span<const ConflictRecord> records,
                                    const ScatterOptions& options) {
  double dmax = options.dist_threshold;
  for (const ConflictRecord& r : records) dmax = std::max(dmax, r.distance_m);
  dmax = std::ceil(dmax);
  const Frame f{0.0, dmax, 0.0, 1.0};

  std::ostringstream out;
  header(out, options.title);
  axes(out, f, "distance (m)", "conflict probability");
  out << "<g stroke=\"#888888\" stroke-dasharray=\"4 3\">\n";
  out << "<line x1=\"" << num(f.px(options.dist_threshold)) << "\" y1=\""
      << num(f.py(0)) << "\" x2=\"" << num(f.px(options.dist_threshold))
      << "\" y2=\"" << num(f.py(1)) << "\"/>\n";
  out << "<line x1=\"" << num(f.px(0)) << "\" y1=\"" << num(f.py(options.prob_threshold))
      << "\" x2=\"" << num(f.px(dmax)) << "\" y2=\"" << num(f.py(options.prob_threshold))
      << "\"/>\n</g>\n";
  out << "<g>\n";
  for (const ConflictRecord& r : records) {
    const char* color = r.is_high_risk ? "#d62728" : (r.is_conflict ? "#ff7f0e" : "#1f77b4");
    out << "<circle cx=\"" << num(f.px(r.distance_m)) << "\" cy=\""
        << num(f.py(r.probability)) << "\" r=\"2.500\" fill=\"" << color
        << "\" fill-opacity=\"0.6\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

std::string trajectory_overlay_svg(const PredictionSet& predictions,
                                   const ScenarioCase* truth, int history_len) {
  const int first_hist = predictions.issue_frame - std::max(0, history_len - 1);
  const int last_future = predictions.issue_frame + predictions.horizon;

  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  auto grow = [&](Vec2 p) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  };
  for (const PredictedAgent& a : predictions.agents) {
    for (const Trajectory& m : a.modes) {
      for (const Vec2& p : m) grow(p);
    }
  }
  std::vector<std::pair<std::vector<Vec2>, std::vector<Vec2>>> gt;
  if (truth) {
    for (const PredictedAgent& a : predictions.agents) {
      const auto it = truth->tracks.find(a.track_id);
      if (it == truth->tracks.end()) continue;
      std::vector<Vec2> past;
      std::vector<Vec2> future;
      for (const TrackPoint& p : it->second.points) {
        if (p.frame_id >= first_hist && p.frame_id <= predictions.issue_frame) {
          past.push_back(p.position());
        } else if (p.frame_id > predictions.issue_frame && p.frame_id <= last_future) {
          future.push_back(p.position());
        }
        if (p.frame_id >= first_hist && p.frame_id <= last_future) grow(p.position());
      }
      gt.emplace_back(std::move(past), std::move(future));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  // Equal scale on both axes.
  const double span = std::max({x1 - x0, (y1 - y0) * (kWidth - 2 * kMargin) /
                                             (kHeight - 2 * kMargin), 1.0});
  const double cx = 0.5 * (x0 + x1);
  const double cy = 0.5 * (y0 + y1);
  const double yspan = span * (kHeight - 2 * kMargin) / (kWidth - 2 * kMargin);
  const Frame f{cx - span / 2 - 1, cx + span / 2 + 1, cy - yspan / 2 - 1, cy + yspan / 2 + 1};

  auto path = [&](const std::vector<Vec2>& pts) {
    std::string d;
    for (const Vec2& p : pts) {
      d += d.empty() ? "" : " ";
      d += num(f.px(p.x)) + "," + num(f.py(p.y));
    }
    return d;
  };

  std::ostringstream out;
  header(out, "Case " + std::to_string(predictions.case_id) + ", frame " +
                  std::to_string(predictions.issue_frame));
  axes(out, f, "x (m)", "y (m)", 4);
  out << "<g fill=\"none\" stroke-width=\"1.5\">\n";
  for (const auto& [past, future] : gt) {
    if (past.size() > 1) {
      out << "<polyline points=\"" << path(past) << "\" stroke=\"#444444\"/>\n";
    }
    if (future.size() > 1) {
      out << "<polyline points=\"" << path(future)
          << "\" stroke=\"#2ca02c\" stroke-dasharray=\"3 2\"/>\n";
    }
  }
  for (const PredictedAgent& a : predictions.agents) {
    for (std::size_t m = 0; m < a.modes.size(); ++m) {
      const double opacity = 0.15 + 0.85 * a.mode_probs[m];
      out << "<polyline points=\"" << path(a.modes[m]) << "\" stroke=\"#1f77b4\" "
          << "stroke-opacity=\"" << num(opacity) << "\"/>\n";
    }
  }
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"9\">\n";
  for (const PredictedAgent& a : predictions.agents) {
    const Vec2 p = a.anchor.position;
    out << "<rect x=\"" << num(f.px(p.x) - 2) << "\" y=\"" << num(f.py(p.y) - 2)
        << "\" width=\"4.000\" height=\"4.000\" fill=\"#d62728\"/>\n";
    if (!a.modes.empty() && !a.modes.front().empty()) {
      const Vec2 e = a.modes.front().back();
      out << "<text x=\"" << num(f.px(e.x) + 3) << "\" y=\"" << num(f.py(e.y) - 3)
          << "\">" << a.track_id << "</text>\n";
    }
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace wz
