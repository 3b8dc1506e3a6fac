#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "wzsentinel/geometry.hpp"

#ifndef WZ_DATA_DIR
#define WZ_DATA_DIR "data"
#endif

namespace wztest {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(WZ_DATA_DIR) / rel;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wz_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Separating-axis overlap test on the four corners (touching counts).
inline bool boxes_overlap(const wz::OrientedBox& a, const wz::OrientedBox& b) {
  const auto pa = wz::box_points(a);
  const auto pb = wz::box_points(b);
  for (const wz::OrientedBox* o : {&a, &b}) {
    for (int k = 0; k < 2; ++k) {
      const double h = o->heading + k * wz::kPi / 2;
      const wz::Vec2 axis{std::cos(h), std::sin(h)};
      double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
      for (std::size_t i = 0; i < pa.size(); ++i) {
        amin = std::min(amin, wz::dot(pa[i], axis));
        amax = std::max(amax, wz::dot(pa[i], axis));
        bmin = std::min(bmin, wz::dot(pb[i], axis));
        bmax = std::max(bmax, wz::dot(pb[i], axis));
      }
      if (amax < bmin || bmax < amin) return false;
    }
  }
  return true;
}

}  // namespace wztest
