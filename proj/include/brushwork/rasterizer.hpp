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

#include <array>
#include <cstdint>

#include <Eigen/Core>

#include "brushwork/image.hpp"
#include "brushwork/stroke_model.hpp"

namespace brushwork {

/// Foreground color field s and alpha matte for one stroke.
struct RenderOut {
  Canvas foreground;
  PlaneD alpha;

  RenderOut() = default;
  RenderOut(Eigen::Index height, Eigen::Index width)
      : foreground(height, width, 0.0), alpha(PlaneD::Zero(height, width)) {}
};

/// Edge softness of the differentiable path.
///
/// `sharpness` is the sigmoid slope per pixel of a canvas at
/// `reference_resolution`. At any other resolution the slope is rescaled
/// so the soft edge keeps the same width relative to the canvas, which
/// makes a painting render identically at every size.
struct SoftnessConfig {
  double sharpness = 2.0;
  int samples_per_curve = 64;
  int reference_resolution = 128;

  double pixel_sharpness(int resolution) const {
    return sharpness * reference_resolution / static_cast<double>(resolution);
  }
  void validate() const;
};

/// Procedural streak pattern multiplied into oil strokes. It lives in
/// stroke-local coordinates (streaks run along the stroke direction) and is
/// never optimized.
struct StreakTexture {
  static constexpr int kTerms = 3;
  std::array<double, kTerms> frequency{};
  std::array<double, kTerms> phase{};
  std::array<double, kTerms> weight{};
  double amplitude = 0.25;

  static StreakTexture from_seed(std::uint64_t seed);
  static const StreakTexture& standard();

  /// Texture value at normalized cross-stroke coordinate z (z in [-1, 1]
  /// inside the stroke). Writes dT/dz when `derivative` is non-null.
  double value(double z, double* derivative = nullptr) const;
};

/// Binary-edged reference rendering (the "vector engine").
RenderOut hard_rasterize(const StrokeParams& p, int resolution, const SoftnessConfig& cfg = {});

/// Differentiable rendering: alpha = A * sigmoid(k * sdf), sdf positive
/// inside the stroke.
RenderOut soft_rasterize(const StrokeParams& p, int resolution, const SoftnessConfig& cfg = {});

/// Vector-Jacobian product of soft_rasterize: returns
/// sum over pixels of upstream . d(RenderOut)/d(p.values).
Eigen::VectorXd rasterize_vjp(const StrokeParams& p, int resolution, const SoftnessConfig& cfg,
                              const Canvas& upstream_foreground, const PlaneD& upstream_alpha);

}  // namespace brushwork
