// Copyright 2026 The Brushwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>

#include <Eigen/Core>

namespace brushwork {

enum class BrushType { kOilPaint, kMarkerPen, kWatercolor, kColorTape };

/// Number of stored (normalized) parameters per stroke.
int param_count(BrushType brush);
/// Leading slice of the parameter vector that controls geometry only.
int shape_param_count(BrushType brush);
/// Oil paint and color tape are opaque; their transparency is not stored.
bool has_transparency(BrushType brush);
bool is_curve_brush(BrushType brush);

std::string_view brush_tag(BrushType brush);
std::optional<BrushType> brush_from_tag(std::string_view tag);

// Controller order of each parameter vector.
namespace rect_param {
inline constexpr int kX = 0;
inline constexpr int kY = 1;
inline constexpr int kLength = 2;  // h: extent along the stroke direction
inline constexpr int kWidth = 3;   // w: extent across the stroke direction
inline constexpr int kAngle = 4;   // theta over [0, 180] degrees
inline constexpr int kHeadColor = 5;
inline constexpr int kTailColor = 8;  // oil paint only
}  // namespace rect_param

namespace curve_param {
inline constexpr int kX0 = 0;
inline constexpr int kY0 = 1;
inline constexpr int kX1 = 2;
inline constexpr int kY1 = 3;
inline constexpr int kX2 = 4;
inline constexpr int kY2 = 5;
// Marker pen: thickness d, one color, transparency.
inline constexpr int kThickness = 6;
inline constexpr int kMarkerColor = 7;
inline constexpr int kMarkerAlpha = 10;
// Watercolor: endpoint radii, endpoint colors, transparency.
inline constexpr int kRadius0 = 6;
inline constexpr int kRadius2 = 7;
inline constexpr int kHeadColor = 8;
inline constexpr int kTailColor = 11;
inline constexpr int kWatercolorAlpha = 14;
}  // namespace curve_param

/// Brush-typed vector of normalized parameters, each in [0, 1].
struct StrokeParams {
  BrushType brush = BrushType::kOilPaint;
  Eigen::VectorXd values;

  static StrokeParams zeros(BrushType brush) {
    return {brush, Eigen::VectorXd::Zero(param_count(brush))};
  }

  bool has_valid_length() const { return values.size() == param_count(brush); }
  bool in_unit_box() const {
    return (values.array() >= 0.0).all() && (values.array() <= 1.0).all();
  }

  /// Stored transparency, or 1 for opaque brushes.
  double transparency() const;

  bool operator==(const StrokeParams& other) const {
    return brush == other.brush && values.size() == other.values.size() &&
           values == other.values;
  }
};

StrokeParams sample_random_stroke(BrushType brush, std::uint64_t seed);

/// Projects every component onto [0, 1].
StrokeParams clamp_params(StrokeParams p);

/// Quadratic Bezier B(t) = (1-t)^2 P0 + 2(1-t)t P1 + t^2 P2 for t in [0, 1].
template <typename Derived0, typename Derived1, typename Derived2>
Eigen::Matrix<typename Derived0::Scalar, Derived0::RowsAtCompileTime, 1> bezier_point(
    const Eigen::MatrixBase<Derived0>& p0, const Eigen::MatrixBase<Derived1>& p1,
    const Eigen::MatrixBase<Derived2>& p2, typename Derived0::Scalar t) {
  using Scalar = typename Derived0::Scalar;
  if (!(t >= Scalar(0) && t <= Scalar(1)))
    throw std::invalid_argument("bezier_point: t must lie in [0, 1]");
  const Scalar s = Scalar(1) - t;
  return s * s * p0 + Scalar(2) * s * t * p1 + t * t * p2;
}

/// Floor applied to extents, thickness and radii, in pixels.
inline constexpr double kMinStrokeExtentPx = 2.0;

/// Smooth floor: m + softplus(x - m) - softplus(-m) with a 1/4 px
/// transition. Equals m at x = 0, stays within 1e-4 px of x once x exceeds
/// m by a few pixels, and has a strictly positive slope so collapsed strokes
/// can grow back. Writes the slope when `slope` is non-null.
double floored_extent(double x, double* slope = nullptr);
inline constexpr int kMinResolution = 8;

/// Oil paint / color tape: rotated rectangle in pixel units.
struct RectGeometry {
  Eigen::Vector2d center;
  double length = 0;     // along the stroke direction
  double width = 0;      // across the stroke direction
  double angle_deg = 0;  // [0, 180]
  Eigen::Vector3d head;  // tape: the single color
  Eigen::Vector3d tail;  // tape: equal to head
  double alpha = 1;
  double length_slope = 1;  // d length / d (normalized length * resolution)
  double width_slope = 1;
};

/// Marker pen / watercolor: disks swept along a quadratic Bezier.
struct CurveGeometry {
  Eigen::Vector2d p0, p1, p2;
  double r0 = 0;  // radius at P0 (marker: d / 2)
  double r2 = 0;  // radius at P2 (marker: d / 2)
  Eigen::Vector3d head;
  Eigen::Vector3d tail;
  double alpha = 1;
  double r0_slope = 1;  // d r0 / d (stored size * resolution)
  double r2_slope = 1;
};

using StrokeGeometry = std::variant<RectGeometry, CurveGeometry>;

/// Maps normalized parameters to pixel geometry at the given square
/// resolution. Pixel (row i, col j) has its center at (j + 0.5, i + 0.5).
StrokeGeometry denormalize(const StrokeParams& p, int resolution);

}  // namespace brushwork
