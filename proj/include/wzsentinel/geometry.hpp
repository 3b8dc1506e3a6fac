#pragma once

#include <array>
#include <cmath>

namespace wz {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Maps any angle into (-pi, pi]. Exactly -pi maps to +pi.
double normalize_angle(double radians);

/// Rigid vehicle footprint. Zero length/width is legal and collapses the
/// footprint onto its center.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;
};

/// Four corners followed by the four edge midpoints, in the global frame.
/// Order: front-left, front-right, rear-right, rear-left, front, right, rear,
/// left.
using BoxPointSet = std::array<Vec2, 8>;

/// Local (u, v) offset rotated by psi:
/// (u cos psi - v sin psi, u sin psi + v cos psi).
Vec2 rotate_point(double u, double v, double psi);

/// Throws InvalidArgument for negative or non-finite dimensions.
void validate_box(const OrientedBox& box);

BoxPointSet box_points(const OrientedBox& box);

/// Minimum Euclidean distance over all 8x8 pairs of footprint points. This is
/// a point-set distance: overlapping footprints can still report a positive
/// value.
double min_box_distance(const OrientedBox& a, const OrientedBox& b);

}  // namespace wz
