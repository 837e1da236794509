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

#include <span>
#include <vector>

#include <Eigen/Core>

#include "brushwork/image.hpp"
#include "brushwork/rasterizer.hpp"
#include "brushwork/stroke_model.hpp"

namespace brushwork {

enum class RenderMode { kSoft, kHard };

/// h' = alpha * s + (1 - alpha) * h, per channel.
Canvas blend(const Canvas& canvas, const RenderOut& stroke);

/// Folds blend over the strokes in paint order.
Canvas render_sequence(std::span<const StrokeParams> strokes, const Canvas& initial, int resolution,
                       const SoftnessConfig& cfg, RenderMode mode);

/// Gradient of <upstream, h_T> with respect to every stroke's parameters
/// (soft path only).
std::vector<Eigen::VectorXd> sequence_vjp(std::span<const StrokeParams> strokes,
                                          const Canvas& initial, int resolution,
                                          const SoftnessConfig& cfg, const Canvas& upstream);

/// Forward pass of a soft stroke sequence that keeps each stroke's render
/// and the canvas underneath it, so one forward can serve a backward pass.
class SequenceTape {
 public:
  SequenceTape(std::span<const StrokeParams> strokes, const Canvas& initial, int resolution,
               const SoftnessConfig& cfg);

  const Canvas& result() const { return result_; }

  std::vector<Eigen::VectorXd> backward(const Canvas& upstream) const;

 private:
  std::vector<StrokeParams> strokes_;
  std::vector<RenderOut> renders_;
  std::vector<Canvas> below_;  // canvas before each stroke
  Canvas result_;
  int resolution_;
  SoftnessConfig cfg_;
};

}  // namespace brushwork
