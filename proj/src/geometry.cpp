#include "wzsentinel/geometry.hpp"

#include <limits>
#include <string>

#include "wzsentinel/error.hpp"

namespace wz {

double normalize_angle(double radians) {
  double a = std::remainder(radians, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Vec2 rotate_point(double u, double v, double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  return {u * c - v * s, u * s + v * c};
}

void validate_box(const OrientedBox& box) {
  if (!std::isfinite(box.length) || !std::isfinite(box.width) ||
      box.length < 0.0 || box.width < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "box dimensions must be finite and non-negative (length=" +
                    std::to_string(box.length) +
                    ", width=" + std::to_string(box.width) + ")");
  }
  if (!std::isfinite(box.center.x) || !std::isfinite(box.center.y) ||
      !std::isfinite(box.heading)) {
    throw Error(ErrorCode::InvalidArgument, "box pose must be finite");
  }
}

BoxPointSet box_points(const OrientedBox& box) {
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const std::array<Vec2, 8> local = {{
      {hl, hw}, {hl, -hw}, {-hl, -hw}, {-hl, hw},
      {hl, 0.0}, {0.0, -hw}, {-hl, 0.0}, {0.0, hw},
  }};
  BoxPointSet out;
  for (std::size_t i = 0; i < local.size(); ++i) {
    out[i] = box.center + rotate_point(local[i].x, local[i].y, box.heading);
  }
  return out;
}

double min_box_distance(const OrientedBox& a, const OrientedBox& b) {
  validate_box(a);
  validate_box(b);
  const BoxPointSet pa = box_points(a);
  const BoxPointSet pb = box_points(b);
  double best_sq = std::numeric_limits<double>::infinity();
  for (const Vec2& p : pa) {
    for (const Vec2& q : pb) {
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_sq) {
        best_sq = d2;
        if (best_sq == 0.0) return 0.0;
      }
    }
  }
  return std::sqrt(best_sq);
}

}  // namespace wz
