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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "brushwork/document.hpp"
#include "brushwork/image.hpp"
#include "brushwork/losses.hpp"
#include "brushwork/rasterizer.hpp"
#include "brushwork/stroke_model.hpp"

namespace brushwork {

struct PaintConfig {
  BrushType brush = BrushType::kOilPaint;
  int total_strokes = 300;
  std::vector<int> scales{1, 2, 3, 4};
  double overlap_fraction = 0.2;
  int steps_per_stroke = 20;
  int working_resolution = 128;
  double learning_rate = 0.01;
  LossWeights weights;
  SinkhornConfig sinkhorn;
  SoftnessConfig softness;
  std::uint64_t seed = 0;
  Rgb background = Rgb::Ones();

  void validate() const;
};

/// RMSprop accumulator.
struct OptimState {
  Eigen::VectorXd v;
  double decay = 0.9;
  double stabilizer = 1e-8;
  long steps = 0;

  static OptimState fresh(Eigen::Index size) {
    OptimState s;
    s.v = Eigen::VectorXd::Zero(size);
    return s;
  }
};

/// v <- decay v + (1 - decay) g^2; params <- clamp(params - lr g / (sqrt(v) + stabilizer)).
void rmsprop_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimState& state,
                  double learning_rate);

/// Axis-aligned rectangle in normalized canvas coordinates.
struct Block {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;

  double side() const { return std::max(x1 - x0, y1 - y0); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/// Blocks of an m x m partition, each grown by `overlap` of its side
/// (half on every edge) and clipped to the canvas. Row-major scan order.
std::vector<Block> partition_blocks(int m, double overlap);

/// Strokes to place in each block, scale by scale in scan order.
std::vector<std::vector<int>> stroke_budgets(int total_strokes, const std::vector<int>& scales);

/// Strokes being optimized over a fixed, pre-rendered background.
struct ActiveSet {
  std::vector<std::size_t> indices;  // position in the final paint order
  std::vector<StrokeParams> strokes;
  Canvas background;
};

/// Random strokes centered inside `block`, sized 0.1-0.5 of its side and
/// colored by the reference at their centers.
std::vector<StrokeParams> init_strokes_for_block(const Block& block, const Canvas& reference,
                                                 BrushType brush, int n, std::uint64_t seed);

struct OptimizeResult {
  std::vector<StrokeParams> strokes;  // best recorded parameters
  std::vector<LossReport> trace;      // one entry per step, before its update
  LossReport best;
  Canvas canvas;  // background plus the best strokes
};

/// Called once per step with the strokes that were just evaluated.
using StepObserver =
    std::function<void(int step, const std::vector<StrokeParams>& strokes, const LossReport& loss)>;

/// `steps` rounds of render, loss, backpropagation and RMSprop over all
/// active strokes, starting from a fresh optimizer state.
OptimizeResult optimize_active_set(const ActiveSet& set, const PaintingObjective& objective,
                                   const PaintConfig& config, int steps,
                                   const StepObserver& observer = {});
OptimizeResult optimize_active_set(const ActiveSet& set, const Canvas& reference,
                                   const PaintConfig& config, int steps,
                                   const StepObserver& observer = {});

struct BlockTelemetry {
  int scale = 0;
  int block = 0;
  int strokes = 0;
  std::vector<LossReport> trace;
  LossReport best;
  double best_so_far = 0;  // running minimum of best total across blocks
};

struct PaintResult {
  PaintingDocument document;
  std::vector<BlockTelemetry> blocks;
  Canvas canvas;  // soft render at the working resolution
};

/// Coarse-to-fine painting of `reference` (already at working resolution).
/// `on_block` is called after each block finishes.
PaintResult paint(const Canvas& reference, const PaintConfig& config,
                  const std::function<void(const BlockTelemetry&)>& on_block = {});

}  // namespace brushwork
