#include "invnms/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

namespace invnms {
namespace {

// Counts unit cells covered by integer-corner boxes; independent of the
// min/max formulation in the library.
struct CellCounts {
  long a = 0, b = 0, both = 0;
};

CellCounts count_cells(const BoundingBox& a, const BoundingBox& b) {
  CellCounts c;
  for (int x = -2; x < 24; ++x) {
    for (int y = -2; y < 24; ++y) {
      const double cx = x + 0.5, cy = y + 0.5;
      const bool in_a = a.x1() < cx && cx < a.x2() && a.y1() < cy && cy < a.y2();
      const bool in_b = b.x1() < cx && cx < b.x2() && b.y1() < cy && cy < b.y2();
      c.a += in_a;
      c.b += in_b;
      c.both += in_a && in_b;
    }
  }
  return c;
}

BoundingBox random_int_box(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(0, 20);
  int x1 = coord(rng), x2 = coord(rng), y1 = coord(rng), y2 = coord(rng);
  if (x2 < x1) std::swap(x1, x2);
  if (y2 < y1) std::swap(y1, y2);
  return BoundingBox(x1, y1, x2, y2);
}

TEST(BoundingBox, RejectsInvertedCorners) {
  EXPECT_THROW(BoundingBox(5, 0, 4, 1), std::invalid_argument);
  EXPECT_THROW(BoundingBox(0, 5, 1, 4), std::invalid_argument);
  EXPECT_NO_THROW(BoundingBox(3, 7, 3, 9));
}

TEST(BoundingBox, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(BoundingBox(nan, 0, 1, 1), std::invalid_argument);
  EXPECT_THROW(BoundingBox(0, 0, inf, 1), std::invalid_argument);
  EXPECT_THROW(BoundingBox(0, -inf, 1, 1), std::invalid_argument);
}

TEST(BoundingBox, FromXywh) {
  const BoundingBox b = BoundingBox::from_xywh(10, 20, 5, 5);
  EXPECT_EQ(b, BoundingBox(10, 20, 15, 25));
  EXPECT_THROW(BoundingBox::from_xywh(0, 0, -1, 1), std::invalid_argument);
}

TEST(Area, Examples) {
  EXPECT_EQ(area(BoundingBox(0, 0, 10, 10)), 100.0);
  EXPECT_EQ(area(BoundingBox(3, 7, 3, 9)), 0.0);
  EXPECT_EQ(area(BoundingBox(1, 1, 3, 4)), 6.0);
}

TEST(IntersectionArea, Examples) {
  EXPECT_EQ(intersection_area(BoundingBox(0, 0, 2, 2), BoundingBox(1, 1, 3, 3)), 1.0);
  EXPECT_EQ(intersection_area(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)), 0.0);
  EXPECT_EQ(intersection_area(BoundingBox(0, 0, 4, 4), BoundingBox(0, 0, 4, 4)), 16.0);
  // Touching edges share no area.
  EXPECT_EQ(intersection_area(BoundingBox(0, 0, 1, 1), BoundingBox(1, 0, 2, 1)), 0.0);
}

TEST(Iou, Examples) {
  EXPECT_NEAR(iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 1, 3, 3)), 1.0 / 7.0, 1e-12 / 7.0);
  EXPECT_EQ(iou(BoundingBox(3, 4, 9, 11), BoundingBox(3, 4, 9, 11)), 1.0);
  EXPECT_EQ(iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)), 0.0);
}

TEST(Iou, DegenerateBoxesGiveZero) {
  EXPECT_EQ(iou(BoundingBox(1, 1, 1, 1), BoundingBox(1, 1, 1, 1)), 0.0);
  EXPECT_EQ(iou(BoundingBox(0, 0, 0, 5), BoundingBox(0, 0, 0, 5)), 0.0);
  EXPECT_EQ(iou(BoundingBox(0, 0, 0, 5), BoundingBox(0, 0, 4, 4)), 0.0);
}

TEST(Iou, MatchesCellEnumerationOracle) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const BoundingBox a = random_int_box(rng);
    const BoundingBox b = random_int_box(rng);
    const CellCounts c = count_cells(a, b);
    EXPECT_EQ(area(a), static_cast<double>(c.a));
    EXPECT_EQ(intersection_area(a, b), static_cast<double>(c.both));
    const long uni = c.a + c.b - c.both;
    const double expected = uni == 0 ? 0.0 : static_cast<double>(c.both) / static_cast<double>(uni);
    EXPECT_DOUBLE_EQ(iou(a, b), expected);
  }
}

TEST(IouProperty, SymmetryBoundsAndIntersectionLimit) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-100.0, 100.0), len(0.0, 60.0);
  for (int t = 0; t < 20000; ++t) {
    const BoundingBox a = BoundingBox::from_xywh(pos(rng), pos(rng), len(rng), len(rng));
    const BoundingBox b = BoundingBox::from_xywh(pos(rng), pos(rng), len(rng), len(rng));
    const double ab = iou(a, b);
    ASSERT_EQ(ab, iou(b, a));
    ASSERT_GE(ab, 0.0);
    ASSERT_LE(ab, 1.0);
    ASSERT_LE(intersection_area(a, b), std::min(area(a), area(b)));
  }
}

TEST(IouProperty, ContainmentIsAreaRatio) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 5000; ++t) {
    const double ox = 500 * u(rng), oy = 500 * u(rng);
    const double ow = 1 + 100 * u(rng), oh = 1 + 100 * u(rng);
    const double ix = ox + ow * 0.5 * u(rng), iy = oy + oh * 0.5 * u(rng);
    const double iw = (ox + ow - ix) * u(rng), ih = (oy + oh - iy) * u(rng);
    const BoundingBox outer(ox, oy, ox + ow, oy + oh);
    const BoundingBox inner(ix, iy, ix + iw, iy + ih);
    ASSERT_TRUE(outer.contains(inner));
    const double expected = (inner.width() * inner.height()) / (outer.width() * outer.height());
    EXPECT_NEAR(iou(inner, outer), expected, 1e-12 * std::max(1.0, expected));
  }
}

TEST(IouProperty, TranslationInvariance) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> pos(0.0, 200.0), len(1.0, 50.0), shift(-100.0, 100.0);
  for (int t = 0; t < 5000; ++t) {
    const double ax = pos(rng), ay = pos(rng), aw = len(rng), ah = len(rng);
    const double bx = pos(rng), by = pos(rng), bw = len(rng), bh = len(rng);
    const double dx = shift(rng), dy = shift(rng);
    const double base = iou(BoundingBox::from_xywh(ax, ay, aw, ah), BoundingBox::from_xywh(bx, by, bw, bh));
    const double moved = iou(BoundingBox::from_xywh(ax + dx, ay + dy, aw, ah),
                             BoundingBox::from_xywh(bx + dx, by + dy, bw, bh));
    EXPECT_NEAR(moved, base, 1e-12) << t;
  }
}

}  // namespace
}  // namespace invnms
