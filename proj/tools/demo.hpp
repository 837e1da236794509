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

#include <vector>

#include "brushwork/image.hpp"
#include "brushwork/losses.hpp"
#include "brushwork/painter.hpp"
#include "brushwork/rasterizer.hpp"
#include "brushwork/stroke_model.hpp"

namespace brushwork {

/// Intersection over union of the alpha > 0.5 regions.
double alpha_iou(const PlaneD& a, const PlaneD& b);

/// Axis-aligned tape square; `size` is the side in normalized units.
StrokeParams square_stroke(double x, double y, double size, double gray);

/// A black square slides horizontally away from an identical target square.
/// A soft square moves away from a hard target square along `direction`,
/// snapped to whole-pixel offsets; rows report the snapped distance. With
/// the target centered on a pixel corner the moving square is mirror
/// symmetric on the grid, so sampling cannot bias its position gradient.
/// The defaults keep the moving square's soft footprint (edge plus cutoff
/// margin) on the canvas and, from 40 px on, clear of the target.
struct ZeroGradConfig {
  int resolution = 128;
  double square_px = 20;
  double target_x_px = 10;
  double target_y_px = 10;
  Eigen::Vector2d direction{37, 15};
  std::vector<double> distances_px;  // empty: 0, 5, ..., 100
  SinkhornConfig sinkhorn;
  SoftnessConfig softness;
  double fd_step = 1e-5;
};

struct SweepRow {
  double distance_px = 0;
  double l1 = 0;
  double l1_grad_norm = 0;  // analytic, over all stroke parameters
  double l1_fd_grad = 0;    // central difference magnitude over (x, y)
  double ot = 0;
};

std::vector<SweepRow> zero_gradient_sweep(const ZeroGradConfig& cfg);

/// One tape stroke starting disjoint from a hard-rendered target stroke.
struct ConvergenceConfig {
  int steps = 500;
  double learning_rate = 0.01;
  LossWeights weights;
  SinkhornConfig sinkhorn;
  SoftnessConfig softness;
  double target_x = 0.3, target_y = 0.3;
  double start_x = 0.7, start_y = 0.7;
  double size = 0.2;
  double gray = 0.1;
};

struct ConvergenceTrace {
  std::vector<double> iou;  // per step, strokes as evaluated
  std::vector<LossReport> loss;
  double final_iou = 0;  // of the returned (best) stroke
};

ConvergenceTrace single_stroke_convergence(const ConvergenceConfig& cfg);

}  // namespace brushwork
