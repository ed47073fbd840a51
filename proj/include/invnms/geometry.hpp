#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace invnms {

/// Axis-aligned rectangle in corner form, continuous pixel coordinates.
///
/// Invariants: all coordinates finite, x2 >= x1 and y2 >= y1. Zero-area boxes
/// are allowed; inverted corners throw std::invalid_argument.
class BoundingBox {
 public:
  BoundingBox() = default;

  BoundingBox(double x1, double y1, double x2, double y2)
      : x1_(x1), y1_(y1), x2_(x2), y2_(y2) {
    if (!std::isfinite(x1) || !std::isfinite(y1) || !std::isfinite(x2) ||
        !std::isfinite(y2)) {
      throw std::invalid_argument("BoundingBox: non-finite coordinate");
    }
    if (x2 < x1 || y2 < y1) {
      throw std::invalid_argument("BoundingBox: inverted corners (" + std::to_string(x1) + "," +
                                  std::to_string(y1) + "," + std::to_string(x2) + "," +
                                  std::to_string(y2) + ")");
    }
  }

  /// Corner+size form used by the block text files.
  static BoundingBox from_xywh(double x, double y, double w, double h) {
    if (!(w >= 0.0) || !(h >= 0.0)) {
      throw std::invalid_argument("BoundingBox: negative width or height");
    }
    return BoundingBox(x, y, x + w, y + h);
  }

  double x1() const noexcept { return x1_; }
  double y1() const noexcept { return y1_; }
  double x2() const noexcept { return x2_; }
  double y2() const noexcept { return y2_; }
  double width() const noexcept { return x2_ - x1_; }
  double height() const noexcept { return y2_ - y1_; }
  double longer_side() const noexcept { return std::max(width(), height()); }

  bool contains(const BoundingBox& other) const noexcept {
    return x1_ <= other.x1_ && y1_ <= other.y1_ && other.x2_ <= x2_ && other.y2_ <= y2_;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double x1_ = 0.0;
  double y1_ = 0.0;
  double x2_ = 0.0;
  double y2_ = 0.0;
};

inline double area(const BoundingBox& b) noexcept { return (b.x2() - b.x1()) * (b.y2() - b.y1()); }

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::min(a.x2(), b.x2()) - std::max(a.x1(), b.x1());
  const double ih = std::min(a.y2(), b.y2()) - std::max(a.y1(), b.y1());
  return std::max(0.0, iw) * std::max(0.0, ih);
}

/// Intersection over union in [0, 1]. Returns 0 when the union is empty.
/// Bitwise symmetric: every step is a commutative IEEE operation.
inline double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double inter = intersection_area(a, b);
  const double area_a = area(a);
  const double area_b = area(b);
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::min(1.0, inter / uni);
}

}  // namespace invnms
