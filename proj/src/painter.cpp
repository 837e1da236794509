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


#include "brushwork/painter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "brushwork/compositor.hpp"
#include "brushwork/random.hpp"

namespace brushwork {

void PaintConfig::validate() const {
  if (total_strokes < 1) throw std::invalid_argument("paint: total_strokes must be >= 1");
  if (scales.empty()) throw std::invalid_argument("paint: scales must be nonempty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 1) throw std::invalid_argument("paint: scales must be >= 1");
    if (i > 0 && scales[i] < scales[i - 1])
      throw std::invalid_argument("paint: scales must be nondecreasing");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 0.5))
    throw std::invalid_argument("paint: overlap_fraction must lie in [0, 0.5)");
  if (steps_per_stroke < 1) throw std::invalid_argument("paint: steps_per_stroke must be >= 1");
  if (working_resolution < kMinResolution)
    throw std::invalid_argument("paint: working_resolution below minimum");
  if (!(learning_rate > 0)) throw std::invalid_argument("paint: learning_rate must be positive");
  for (int c = 0; c < 3; ++c)
    if (!(background[c] >= 0.0 && background[c] <= 1.0))
      throw std::invalid_argument("paint: background outside [0, 1]");
  weights.validate();
  sinkhorn.validate();
  softness.validate();
}

void rmsprop_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimState& state,
                  double learning_rate) {
  if (state.v.size() == 0) state.v = Eigen::VectorXd::Zero(params.size());
  if (grads.size() != params.size() || state.v.size() != params.size())
    throw std::invalid_argument("rmsprop_step: shape mismatch");
  state.v = state.decay * state.v + (1.0 - state.decay) * grads.cwiseAbs2();
  params.array() -= learning_rate * grads.array() / (state.v.array().sqrt() + state.stabilizer);
  params = params.cwiseMax(0.0).cwiseMin(1.0);
  ++state.steps;
}

std::vector<Block> partition_blocks(int m, double overlap) {
  if (m < 1) throw std::invalid_argument("partition_blocks: m must be >= 1");
  const double side = 1.0 / m;
  const double grow = 0.5 * overlap * side;
  std::vector<Block> out;
  out.reserve(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out.push_back({std::max(0.0, j * side - grow), std::max(0.0, i * side - grow),
                     std::min(1.0, (j + 1) * side + grow), std::min(1.0, (i + 1) * side + grow)});
  return out;
}

std::vector<std::vector<int>> stroke_budgets(int total_strokes, const std::vector<int>& scales) {
  int cells = 0;
  for (int m : scales) cells += m * m;
  if (total_strokes < 1 || cells < 1)
    throw std::invalid_argument("stroke_budgets: zero stroke budget");
  const int base = total_strokes / cells;
  int remainder = total_strokes % cells;
  std::vector<std::vector<int>> out;
  for (int m : scales) {
    std::vector<int> row(static_cast<std::size_t>(m) * m, base);
    for (int& n : row)
      if (remainder > 0) {
        ++n;
        --remainder;
      }
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

Rgb sample_color(const Canvas& image, double x, double y) {
  const auto h = image.height(), w = image.width();
  const auto row = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(y * h)), 0, h - 1);
  const auto col = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(x * w)), 0, w - 1);
  return {image[0](row, col), image[1](row, col), image[2](row, col)};
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kInitialTransparency = 0.8;

}  // namespace

std::vector<StrokeParams> init_strokes_for_block(const Block& block, const Canvas& reference,
                                                 BrushType brush, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("init_strokes_for_block: n must be >= 1");
  Rng rng(seed);
  const double side = block.side();
  std::vector<StrokeParams> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    StrokeParams p = StrokeParams::zeros(brush);
    auto& v = p.values;
    const double cx = rng.uniform(block.x0, block.x1);
    const double cy = rng.uniform(block.y0, block.y1);
    const Rgb color = sample_color(reference, cx, cy);

    if (!is_curve_brush(brush)) {
      using namespace rect_param;
      v[kX] = cx;
      v[kY] = cy;
      v[kLength] = rng.uniform(0.1, 0.5) * side;
      v[kWidth] = rng.uniform(0.1, 0.5) * side;
      v[kAngle] = rng.uniform();
      v.segment<3>(kHeadColor) = color;
      if (brush == BrushType::kOilPaint) v.segment<3>(kTailColor) = color;
    } else {
      using namespace curve_param;
      const double extent = rng.uniform(0.1, 0.5) * side;
      const double theta = rng.uniform(0.0, kPi);
      const double bend = rng.uniform(-0.25, 0.25) * extent;
      const Eigen::Vector2d c(cx, cy), dir(std::cos(theta), std::sin(theta)), normal(-dir.y(), dir.x());
      const Eigen::Vector2d p0 = (c - 0.5 * extent * dir).cwiseMax(0.0).cwiseMin(1.0);
      const Eigen::Vector2d p1 = (c + bend * normal).cwiseMax(0.0).cwiseMin(1.0);
      const Eigen::Vector2d p2 = (c + 0.5 * extent * dir).cwiseMax(0.0).cwiseMin(1.0);
      v.segment<2>(kX0) = p0;
      v.segment<2>(kX1) = p1;
      v.segment<2>(kX2) = p2;
      if (brush == BrushType::kMarkerPen) {
        v[kThickness] = 0.5 * rng.uniform(0.1, 0.5) * side;
        v.segment<3>(kMarkerColor) = color;
        v[kMarkerAlpha] = kInitialTransparency;
      } else {
        v[kRadius0] = 0.25 * rng.uniform(0.1, 0.5) * side;
        v[kRadius2] = 0.25 * rng.uniform(0.1, 0.5) * side;
        v.segment<3>(kHeadColor) = color;
        v.segment<3>(kTailColor) = color;
        v[kWatercolorAlpha] = kInitialTransparency;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

OptimizeResult optimize_active_set(const ActiveSet& set, const PaintingObjective& objective,
                                   const PaintConfig& config, int steps,
                                   const StepObserver& observer) {
  if (steps < 1) throw std::invalid_argument("optimize_active_set: steps must be >= 1");
  const int resolution = config.working_resolution;
  std::vector<StrokeParams> strokes = set.strokes;
  std::vector<Eigen::Index> offset{0};
  for (const auto& s : strokes) {
    if (s.brush != config.brush)
      throw std::invalid_argument("optimize_active_set: brush does not match configuration");
    offset.push_back(offset.back() + s.values.size());
  }

  Eigen::VectorXd flat(offset.back());
  for (std::size_t i = 0; i < strokes.size(); ++i)
    flat.segment(offset[i], strokes[i].values.size()) = strokes[i].values;
  OptimState state = OptimState::fresh(flat.size());

  OptimizeResult result;
  result.trace.reserve(steps);
  result.best.total = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad(flat.size());
  for (int step = 0; step < steps; ++step) {
    const SequenceTape tape(strokes, set.background, resolution, config.softness);
    const TotalLoss loss = objective.evaluate(tape.result());
    result.trace.push_back(loss.report);
    if (observer) observer(step, strokes, loss.report);
    if (loss.report.total < result.best.total) {
      result.best = loss.report;
      result.strokes = strokes;
      result.canvas = tape.result();
    }
    const std::vector<Eigen::VectorXd> g = tape.backward(loss.gradient);
    for (std::size_t i = 0; i < strokes.size(); ++i)
      grad.segment(offset[i], g[i].size()) = g[i];
    rmsprop_step(flat, grad, state, config.learning_rate);
    for (std::size_t i = 0; i < strokes.size(); ++i)
      strokes[i].values = flat.segment(offset[i], strokes[i].values.size());
  }
  return result;
}

OptimizeResult optimize_active_set(const ActiveSet& set, const Canvas& reference,
                                   const PaintConfig& config, int steps,
                                   const StepObserver& observer) {
  const PaintingObjective objective(reference, config.weights, config.sinkhorn);
  return optimize_active_set(set, objective, config, steps, observer);
}

PaintResult paint(const Canvas& reference, const PaintConfig& config,
                  const std::function<void(const BlockTelemetry&)>& on_block) {
  config.validate();
  const int resolution = config.working_resolution;
  if (reference.height() != resolution || reference.width() != resolution)
    throw std::invalid_argument("paint: reference must be resized to the working resolution");

  const PaintingObjective objective(reference, config.weights, config.sinkhorn);
  const auto budgets = stroke_budgets(config.total_strokes, config.scales);

  PaintResult result;
  PaintingDocument& doc = result.document;
  doc.brush = config.brush;
  doc.background = config.background;
  doc.provenance = {config.seed, config.weights, config.scales, config.softness.sharpness};
  doc.strokes.reserve(config.total_strokes);
  result.canvas = Canvas::filled(resolution, resolution, config.background);

  double best_so_far = std::numeric_limits<double>::infinity();
  std::uint64_t block_counter = 0;
  for (std::size_t si = 0; si < config.scales.size(); ++si) {
    const std::vector<Block> blocks = partition_blocks(config.scales[si], config.overlap_fraction);
    for (std::size_t bi = 0; bi < blocks.size(); ++bi, ++block_counter) {
      const int n = budgets[si][bi];
      if (n == 0) continue;
      const int group = std::max(1, n / 4);

      ActiveSet set;
      set.background = result.canvas;
      BlockTelemetry tele;
      tele.scale = config.scales[si];
      tele.block = static_cast<int>(bi);
      tele.strokes = n;
      OptimizeResult opt;
      for (int added = 0, g = 0; added < n; ++g) {
        const int k = std::min(group, n - added);
        const auto fresh = init_strokes_for_block(blocks[bi], reference, config.brush, k,
                                                  mix_seed(config.seed, block_counter * 4096 + g));
        for (int j = 0; j < k; ++j) set.indices.push_back(doc.strokes.size() + added + j);
        set.strokes.insert(set.strokes.end(), fresh.begin(), fresh.end());
        added += k;
        opt = optimize_active_set(set, objective, config, config.steps_per_stroke * k);
        set.strokes = opt.strokes;
        tele.trace.insert(tele.trace.end(), opt.trace.begin(), opt.trace.end());
      }

      result.canvas = opt.canvas;
      for (const auto& s : opt.strokes) doc.strokes.push_back(s.values);
      tele.best = opt.best;
      best_so_far = std::min(best_so_far, opt.best.total);
      tele.best_so_far = best_so_far;
      if (on_block) on_block(tele);
      result.blocks.push_back(std::move(tele));
    }
  }
  return result;
}

}  // namespace brushwork
