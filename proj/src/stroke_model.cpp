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

#include "brushwork/stroke_model.hpp"

#include <algorithm>
#include <cmath>

#include "brushwork/random.hpp"

namespace brushwork {

int param_count(BrushType brush) {
  switch (brush) {
    case BrushType::kOilPaint: return 11;
    case BrushType::kMarkerPen: return 11;
    case BrushType::kWatercolor: return 15;
    case BrushType::kColorTape: return 8;
  }
  throw std::invalid_argument("unknown brush");
}

int shape_param_count(BrushType brush) {
  switch (brush) {
    case BrushType::kOilPaint: return 5;
    case BrushType::kMarkerPen: return 7;
    case BrushType::kWatercolor: return 8;
    case BrushType::kColorTape: return 5;
  }
  throw std::invalid_argument("unknown brush");
}

bool has_transparency(BrushType brush) {
  return brush == BrushType::kMarkerPen || brush == BrushType::kWatercolor;
}

bool is_curve_brush(BrushType brush) { return has_transparency(brush); }

std::string_view brush_tag(BrushType brush) {
  switch (brush) {
    case BrushType::kOilPaint: return "oil";
    case BrushType::kMarkerPen: return "marker";
    case BrushType::kWatercolor: return "watercolor";
    case BrushType::kColorTape: return "tape";
  }
  return "unknown";
}

std::optional<BrushType> brush_from_tag(std::string_view tag) {
  for (BrushType b : {BrushType::kOilPaint, BrushType::kMarkerPen, BrushType::kWatercolor,
                      BrushType::kColorTape})
    if (brush_tag(b) == tag) return b;
  return std::nullopt;
}

double StrokeParams::transparency() const {
  switch (brush) {
    case BrushType::kMarkerPen: return values[curve_param::kMarkerAlpha];
    case BrushType::kWatercolor: return values[curve_param::kWatercolorAlpha];
    default: return 1.0;
  }
}

StrokeParams sample_random_stroke(BrushType brush, std::uint64_t seed) {
  Rng rng(seed);
  StrokeParams p = StrokeParams::zeros(brush);
  for (Eigen::Index i = 0; i < p.values.size(); ++i) p.values[i] = rng.uniform();
  return p;
}

StrokeParams clamp_params(StrokeParams p) {
  p.values = p.values.cwiseMax(0.0).cwiseMin(1.0);
  return p;
}

namespace {

constexpr double kFloorSharpness = 4.0;  // per pixel

// log(1 + exp(k z)) / k without overflow.
double softplus(double z) {
  const double kz = kFloorSharpness * z;
  return (std::max(kz, 0.0) + std::log1p(std::exp(-std::abs(kz)))) / kFloorSharpness;
}

}  // namespace

double floored_extent(double x, double* slope) {
  constexpr double m = kMinStrokeExtentPx;
  if (slope) *slope = 1.0 / (1.0 + std::exp(-kFloorSharpness * (x - m)));
  return m + softplus(x - m) - softplus(-m);
}

StrokeGeometry denormalize(const StrokeParams& p, int resolution) {
  if (resolution < kMinResolution)
    throw std::invalid_argument("denormalize: resolution below minimum");
  if (!p.has_valid_length())
    throw std::invalid_argument("denormalize: parameter count does not match brush");
  const double r = resolution;
  const auto& v = p.values;

  if (!is_curve_brush(p.brush)) {
    using namespace rect_param;
    RectGeometry g;
    g.center = {v[kX] * r, v[kY] * r};
    g.length = floored_extent(v[kLength] * r, &g.length_slope);
    g.width = floored_extent(v[kWidth] * r, &g.width_slope);
    g.angle_deg = v[kAngle] * 180.0;
    g.head = v.segment<3>(kHeadColor);
    g.tail = p.brush == BrushType::kOilPaint ? Eigen::Vector3d(v.segment<3>(kTailColor))
                                             : g.head;
    g.alpha = 1.0;
    return g;
  }

  using namespace curve_param;
  CurveGeometry g;
  g.p0 = {v[kX0] * r, v[kY0] * r};
  g.p1 = {v[kX1] * r, v[kY1] * r};
  g.p2 = {v[kX2] * r, v[kY2] * r};
  if (p.brush == BrushType::kMarkerPen) {
    double slope = 1;
    const double d = floored_extent(v[kThickness] * r, &slope);
    g.r0 = g.r2 = 0.5 * d;
    g.r0_slope = g.r2_slope = 0.5 * slope;
    g.head = g.tail = v.segment<3>(kMarkerColor);
    g.alpha = v[kMarkerAlpha];
  } else {
    g.r0 = floored_extent(v[kRadius0] * r, &g.r0_slope);
    g.r2 = floored_extent(v[kRadius2] * r, &g.r2_slope);
    g.head = v.segment<3>(kHeadColor);
    g.tail = v.segment<3>(kTailColor);
    g.alpha = v[kWatercolorAlpha];
  }
  return g;
}

}  // namespace brushwork
