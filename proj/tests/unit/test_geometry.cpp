#include <doctest.h>

#include <random>

#include "support.hpp"
#include "wzsentinel/error.hpp"
#include "wzsentinel/geometry.hpp"

using namespace wz;

namespace {

// Straight from the definition: all 64 pairs, no shortcuts.
double brute_distance(const OrientedBox& a, const OrientedBox& b) {
  const double la = a.length / 2, wa = a.width / 2;
  const double lb = b.length / 2, wb = b.width / 2;
  const double offs[8][2] = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}, {1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  double best = 1e300;
  for (auto& oa : offs) {
    const double ua = oa[0] * la, va = oa[1] * wa;
    const double xa = a.center.x + ua * std::cos(a.heading) - va * std::sin(a.heading);
    const double ya = a.center.y + ua * std::sin(a.heading) + va * std::cos(a.heading);
    for (auto& ob : offs) {
      const double ub = ob[0] * lb, vb = ob[1] * wb;
      const double xb = b.center.x + ub * std::cos(b.heading) - vb * std::sin(b.heading);
      const double yb = b.center.y + ub * std::sin(b.heading) + vb * std::cos(b.heading);
      best = std::min(best, std::hypot(xa - xb, ya - yb));
    }
  }
  return best;
}

OrientedBox random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-50, 50), ang(-kPi, kPi), len(0, 12), wid(0, 3);
  return {{pos(rng), pos(rng)}, ang(rng), len(rng), wid(rng)};
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("rotation of unit vectors") {
  const Vec2 a = rotate_point(1, 0, 0);
  CHECK(a.x == doctest::Approx(1));
  CHECK(a.y == doctest::Approx(0));
  const Vec2 b = rotate_point(1, 0, kPi / 2);
  CHECK(b.x == doctest::Approx(0).epsilon(1e-15));
  CHECK(std::abs(b.x) < 1e-15);
  CHECK(b.y == doctest::Approx(1));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng), y = u(rng);
    const Vec2 r = rotate_point(x, y, kPi);
    CHECK(std::abs(r.x + x) < 1e-12);
    CHECK(std::abs(r.y + y) < 1e-12);
  }
}

TEST_CASE("axis aligned box points") {
  const auto p = box_points({{0, 0}, 0.0, 4.0, 2.0});
  const Vec2 want[8] = {{2, 1}, {2, -1}, {-2, -1}, {-2, 1}, {2, 0}, {0, -1}, {-2, 0}, {0, 1}};
  for (int i = 0; i < 8; ++i) {
    CHECK(p[i].x == doctest::Approx(want[i].x));
    CHECK(p[i].y == doctest::Approx(want[i].y));
  }
}

TEST_CASE("degenerate box collapses to its center") {
  for (const Vec2& q : box_points({{3, -2}, 1.0, 0.0, 0.0})) {
    CHECK(q == Vec2{3, -2});
  }
}

TEST_CASE("quarter-turn box corners") {
  const auto p = box_points({{5, 0}, kPi / 2, 4.0, 2.0});
  // u along heading (+y), v to the left (-x).
  const Vec2 want[4] = {{4, 2}, {6, 2}, {6, -2}, {4, -2}};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(p[i].x - want[i].x) < 1e-12);
    CHECK(std::abs(p[i].y - want[i].y) < 1e-12);
  }
}

TEST_CASE("invalid boxes are rejected") {
  CHECK_THROWS_AS(validate_box({{0, 0}, 0, -1, 2}), Error);
  CHECK_THROWS_AS(validate_box({{0, 0}, 0, 1, std::nan("")}), Error);
  CHECK_THROWS_AS(min_box_distance({{0, 0}, 0, 1, 1}, {{1, 0}, 0, 1, -0.5}), Error);
}

TEST_CASE("distance examples") {
  CHECK(min_box_distance({{0, 0}, 0, 0, 0}, {{3, 4}, 0, 0, 0}) == 5.0);
  CHECK(min_box_distance({{0, 0}, 0, 4, 2}, {{5, 0}, 0, 4, 2}) == doctest::Approx(1.0));
  const OrientedBox b{{1, 2}, 0.3, 4.5, 1.8};
  CHECK(min_box_distance(b, b) == 0.0);
}

TEST_CASE("distance matches 64-pair enumeration") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const OrientedBox a = random_box(rng), b = random_box(rng);
    CHECK(min_box_distance(a, b) == doctest::Approx(brute_distance(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("symmetry is exact") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox a = random_box(rng), b = random_box(rng);
    CHECK(min_box_distance(a, b) == min_box_distance(b, a));
  }
}

TEST_CASE("rigid motion invariance") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ang(-kPi, kPi), t(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    OrientedBox a = random_box(rng), b = random_box(rng);
    const double d0 = min_box_distance(a, b);
    const double r = ang(rng);
    const Vec2 shift{t(rng), t(rng)};
    for (OrientedBox* box : {&a, &b}) {
      box->center = rotate_point(box->center.x, box->center.y, r) + shift;
      box->heading += r;
    }
    CHECK(std::abs(min_box_distance(a, b) - d0) < 1e-9);
  }
}

TEST_CASE("degenerate reduction to centroid distance") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> pos(-1000, 1000), ang(-kPi, kPi);
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox a{{pos(rng), pos(rng)}, ang(rng), 0, 0};
    const OrientedBox b{{pos(rng), pos(rng)}, ang(rng), 0, 0};
    CHECK(std::abs(min_box_distance(a, b) - distance(a.center, b.center)) <= 1e-12);
  }
}

TEST_CASE("overlapping boxes keep a positive point-set distance") {
  // Crossed boxes share area but no sample point coincides.
  const OrientedBox a{{0, 0}, 0, 4, 2};
  const OrientedBox b{{0, 0}, kPi / 2, 4, 1};
  CHECK(wztest::boxes_overlap(a, b));
  CHECK(min_box_distance(a, b) > 0.0);
}

TEST_CASE("normalize_angle range") {
  CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(-kPi) == doctest::Approx(kPi));
  CHECK(normalize_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    const double a = normalize_angle(u(rng));
    CHECK(a > -kPi);
    CHECK(a <= kPi);
  }
}

}
