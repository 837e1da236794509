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


#include "demo.hpp"

#include <cmath>

#include "brushwork/compositor.hpp"

namespace brushwork {

double alpha_iou(const PlaneD& a, const PlaneD& b) {
  const auto in_a = a > 0.5, in_b = b > 0.5;
  const double uni = (in_a || in_b).count();
  return uni == 0 ? 0.0 : static_cast<double>((in_a && in_b).count()) / uni;
}

StrokeParams square_stroke(double x, double y, double size, double gray) {
  StrokeParams p = StrokeParams::zeros(BrushType::kColorTape);
  using namespace rect_param;
  p.values[kX] = x;
  p.values[kY] = y;
  p.values[kLength] = size;
  p.values[kWidth] = size;
  p.values[kAngle] = 0.0;
  p.values.segment<3>(kHeadColor).setConstant(gray);
  return p;
}

std::vector<SweepRow> zero_gradient_sweep(const ZeroGradConfig& cfg) {
  const int res = cfg.resolution;
  const double size = cfg.square_px / res;
  std::vector<double> distances = cfg.distances_px;
  if (distances.empty())
    for (int d = 0; d <= 100; d += 5) distances.push_back(d);

  const Canvas white = Canvas::filled(res, res, Rgb::Ones());
  const StrokeParams target = square_stroke(cfg.target_x_px / res, cfg.target_y_px / res, size, 0.0);
  const Eigen::Vector2d dir = cfg.direction.normalized();
  const Canvas reference = blend(white, hard_rasterize(target, res, cfg.softness));
  const OtLoss ot(reference, cfg.sinkhorn);

  auto render = [&](const StrokeParams& p) {
    return blend(white, soft_rasterize(p, res, cfg.softness));
  };

  std::vector<SweepRow> rows;
  for (double d : distances) {
    // Whole-pixel offsets keep both squares at the same sub-pixel phase.
    const Eigen::Vector2d offset = (d * dir).array().round().matrix();
    const StrokeParams moving = square_stroke((cfg.target_x_px + offset.x()) / res,
                                              (cfg.target_y_px + offset.y()) / res, size, 0.0);
    SweepRow row;
    row.distance_px = offset.norm();
    const std::vector<StrokeParams> seq{moving};
    const SequenceTape tape(seq, white, res, cfg.softness);
    const LossValue l1 = l1_loss(tape.result(), reference);
    row.l1 = l1.value;
    row.l1_grad_norm = tape.backward(l1.gradient)[0].norm();
    row.ot = ot.evaluate(tape.result(), false).value;

    double fd_sq = 0;
    for (int k : {rect_param::kX, rect_param::kY}) {
      StrokeParams plus = moving, minus = moving;
      plus.values[k] += cfg.fd_step;
      minus.values[k] -= cfg.fd_step;
      const double g = (l1_loss(render(plus), reference).value -
                        l1_loss(render(minus), reference).value) /
                       (2 * cfg.fd_step);
      fd_sq += g * g;
    }
    row.l1_fd_grad = std::sqrt(fd_sq);
    rows.push_back(row);
  }
  return rows;
}

ConvergenceTrace single_stroke_convergence(const ConvergenceConfig& cfg) {
  constexpr int kResolution = 128;
  const StrokeParams target = square_stroke(cfg.target_x, cfg.target_y, cfg.size, cfg.gray);
  const RenderOut target_render = hard_rasterize(target, kResolution, cfg.softness);
  const Canvas white = Canvas::filled(kResolution, kResolution, Rgb::Ones());

  PaintConfig pc;
  pc.brush = BrushType::kColorTape;
  pc.working_resolution = kResolution;
  pc.learning_rate = cfg.learning_rate;
  pc.weights = cfg.weights;
  pc.sinkhorn = cfg.sinkhorn;
  pc.softness = cfg.softness;

  ActiveSet set;
  set.background = white;
  set.indices = {0};
  set.strokes = {square_stroke(cfg.start_x, cfg.start_y, cfg.size, cfg.gray)};

  ConvergenceTrace trace;
  const OptimizeResult result = optimize_active_set(
      set, blend(white, target_render), pc, cfg.steps,
      [&](int, const std::vector<StrokeParams>& strokes, const LossReport& loss) {
        trace.iou.push_back(
            alpha_iou(soft_rasterize(strokes[0], kResolution, cfg.softness).alpha, target_render.alpha));
        trace.loss.push_back(loss);
      });
  trace.final_iou =
      alpha_iou(soft_rasterize(result.strokes[0], kResolution, cfg.softness).alpha, target_render.alpha);
  return trace;
}

}  // namespace brushwork
